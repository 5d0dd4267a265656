#include "ergopipe/io/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <set>

#include "ergopipe/error.hpp"

namespace ergopipe::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ImageBuffer read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) {
    throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::IoFailure, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::ParseError, "corrupt PNG: " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::ParseError,
                "unsupported PNG channel count in " + path.string());
  }

  ImageBuffer img = ImageBuffer::make(static_cast<int>(width),
                                      static_cast<int>(height), channels);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = img.data.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoFailure, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoFailure, "PNG write failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) {
    rows[y] = const_cast<png_bytep>(
        img.data.data() + static_cast<std::size_t>(y) * img.width * img.channels);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImageBuffer read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  }
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") {
    throw Error(ErrorCode::ParseError,
                "expected binary PGM/PPM magic in " + path.string());
  }
  const auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw Error(ErrorCode::ParseError, "truncated PNM header: " + path.string());
  };
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (width <= 0 || height <= 0 || maxval != 255) {
    throw Error(ErrorCode::ParseError,
                "unsupported PNM header in " + path.string());
  }
  in.get();  // single whitespace after maxval
  ImageBuffer img = ImageBuffer::make(width, height, magic == "P5" ? 1 : 3);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.data.size())) {
    throw Error(ErrorCode::ParseError, "truncated PNM data: " + path.string());
  }
  return img;
}

void write_pnm(const std::filesystem::path& path, const ImageBuffer& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) {
    throw Error(ErrorCode::IoFailure, "PNM write failed: " + path.string());
  }
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw Error(ErrorCode::ParseError,
              "unsupported image extension '" + ext + "' (" + path.string() +
                  ")");
}

void write_image(const std::filesystem::path& path, const ImageBuffer& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::IoFailure, "images must have 1 or 3 channels");
  }
  const std::string ext = lower_ext(path);
  if (ext == ".png") return write_png(path, img);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
    return write_pnm(path, img);
  throw Error(ErrorCode::IoFailure,
              "unsupported image extension '" + ext + "' (" + path.string() +
                  ")");
}

std::vector<std::pair<std::string, ImageBuffer>> read_image_dir(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::MissingFile,
                dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_ext(entry.path());
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, ImageBuffer>> corpus;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    const std::string id = p.stem().string();
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::IoFailure,
                  "duplicate image id '" + id + "' in " + dir.string());
    }
    corpus.emplace_back(id, read_image(p));
  }
  return corpus;
}

}  // namespace ergopipe::io
