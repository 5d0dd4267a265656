#include "ergopipe/io/report.hpp"

#include <fstream>

#include "ergopipe/csv.hpp"
#include "ergopipe/error.hpp"

namespace ergopipe::io {

using csv::format_double;
using csv::format_int;

void write_reba_report(std::span<const reba::RebaBreakdown> breakdowns,
                       const std::filesystem::path& path,
                       std::optional<double> unmatched_fraction,
                       int n_skipped) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << "frame_id,person_id,trunk,neck,legs,upper_arm,lower_arm,wrist,"
         "table_a,table_b,score_a,score_b,table_c,activity,reba,category\n";
  for (const auto& b : breakdowns) {
    out << b.frame_id << ',' << b.person_id << ',' << b.parts.trunk << ','
        << b.parts.neck << ',' << b.parts.legs << ',' << b.parts.upper_arm
        << ',' << b.parts.lower_arm << ',' << b.parts.wrist << ','
        << b.table_a << ',' << b.table_b << ',' << b.score_a << ','
        << b.score_b << ',' << b.table_c << ',' << b.activity << ','
        << b.reba << ',' << reba::risk_category_name(b.category) << '\n';
  }

  const auto dist = reba::score_distribution(breakdowns);
  out << "# summary\n";
  out << "total," << dist.total << '\n';
  out << "skipped," << n_skipped << '\n';
  out << "unmatched_fraction,"
      << (unmatched_fraction ? format_double(*unmatched_fraction) : "nan")
      << '\n';
  out << "# score_distribution\nscore,count,fraction\n";
  for (const auto& [score, count] : dist.score_counts) {
    out << score << ',' << count << ','
        << format_double(dist.score_fraction(score)) << '\n';
  }
  out << "# category_distribution\ncategory,count,fraction\n";
  for (const auto& [category, count] : dist.category_counts) {
    out << reba::risk_category_name(category) << ',' << count << ','
        << format_double(dist.category_fraction(category)) << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
  }
}

void append_comparison_block(const reba::CompareReport& report,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot append to " + path.string());
  }
  out << "# comparison\n";
  out << "n_compared," << report.n_compared << '\n';
  out << "n_unmatched," << report.n_unmatched << '\n';
  out << "unmatched_fraction," << format_double(report.unmatched_fraction())
      << '\n';
  out << "exact_match_rate," << format_double(report.exact_match_rate) << '\n';
  out << "same_category_rate," << format_double(report.same_category_rate)
      << '\n';
  out << "# part_deltas\npart,delta,count,fraction\n";
  for (const auto& [part, deltas] : report.part_delta_counts) {
    for (const auto& [delta, count] : deltas) {
      out << part << ',' << delta << ',' << count << ','
          << format_double(report.n_compared > 0
                               ? static_cast<double>(count) / report.n_compared
                               : 0.0)
          << '\n';
    }
  }
  if (!out) {
    throw Error(ErrorCode::IoFailure, "append failed: " + path.string());
  }
}

}  // namespace ergopipe::io
