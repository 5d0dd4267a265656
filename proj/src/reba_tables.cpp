#include "ergopipe/error.hpp"
#include "ergopipe/reba.hpp"

namespace ergopipe::reba {

namespace {

// Table A, indexed [neck-1][trunk-1][legs-1].
constexpr int kTableA[3][5][4] = {
    {{1, 2, 3, 4}, {2, 3, 4, 5}, {2, 4, 5, 6}, {3, 5, 6, 7}, {4, 6, 7, 8}},
    {{1, 2, 3, 4}, {3, 4, 5, 6}, {4, 5, 6, 7}, {5, 6, 7, 8}, {6, 7, 8, 9}},
    {{3, 3, 5, 6}, {4, 5, 6, 7}, {5, 6, 7, 8}, {6, 7, 8, 9}, {7, 8, 9, 9}},
};

// Table B, indexed [lower_arm-1][upper_arm-1][wrist-1].
constexpr int kTableB[2][6][3] = {
    {{1, 2, 2}, {1, 2, 3}, {3, 4, 5}, {4, 5, 5}, {6, 7, 8}, {7, 8, 8}},
    {{1, 2, 3}, {2, 3, 4}, {4, 5, 5}, {5, 6, 7}, {7, 8, 8}, {8, 9, 9}},
};

// Table C, indexed [score_a-1][score_b-1].
constexpr int kTableC[12][12] = {
    {1, 1, 1, 2, 3, 3, 4, 5, 6, 7, 7, 7},
    {1, 2, 2, 3, 4, 4, 5, 6, 6, 7, 7, 8},
    {2, 3, 3, 3, 4, 5, 6, 7, 7, 8, 8, 8},
    {3, 4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9},
    {4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9, 9},
    {6, 6, 6, 7, 8, 8, 9, 9, 10, 10, 10, 10},
    {7, 7, 7, 8, 9, 9, 9, 10, 10, 11, 11, 11},
    {8, 8, 8, 9, 10, 10, 10, 10, 10, 11, 11, 11},
    {9, 9, 9, 10, 10, 10, 11, 11, 11, 12, 12, 12},
    {10, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12, 12},
    {11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12, 12},
    {12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12},
};

void require_range(const char* name, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    throw Error(ErrorCode::IndexOutOfRange,
                std::string(name) + " score " + std::to_string(value) +
                    " outside [" + std::to_string(lo) + "," +
                    std::to_string(hi) + "]");
  }
}

}  // namespace

int table_a(int trunk, int neck, int legs) {
  require_range("trunk", trunk, 1, 5);
  require_range("neck", neck, 1, 3);
  require_range("legs", legs, 1, 4);
  return kTableA[neck - 1][trunk - 1][legs - 1];
}

int table_b(int upper_arm, int lower_arm, int wrist) {
  require_range("upper_arm", upper_arm, 1, 6);
  require_range("lower_arm", lower_arm, 1, 2);
  require_range("wrist", wrist, 1, 3);
  return kTableB[lower_arm - 1][upper_arm - 1][wrist - 1];
}

int table_c(int score_a, int score_b) {
  require_range("score_a", score_a, 1, 12);
  require_range("score_b", score_b, 1, 12);
  return kTableC[score_a - 1][score_b - 1];
}

bool tables_monotonic() {
  for (int trunk = 1; trunk <= 5; ++trunk)
    for (int neck = 1; neck <= 3; ++neck)
      for (int legs = 1; legs <= 4; ++legs) {
        const int v = table_a(trunk, neck, legs);
        if (trunk > 1 && table_a(trunk - 1, neck, legs) > v) return false;
        if (neck > 1 && table_a(trunk, neck - 1, legs) > v) return false;
        if (legs > 1 && table_a(trunk, neck, legs - 1) > v) return false;
      }
  for (int ua = 1; ua <= 6; ++ua)
    for (int la = 1; la <= 2; ++la)
      for (int w = 1; w <= 3; ++w) {
        const int v = table_b(ua, la, w);
        if (ua > 1 && table_b(ua - 1, la, w) > v) return false;
        if (la > 1 && table_b(ua, la - 1, w) > v) return false;
        if (w > 1 && table_b(ua, la, w - 1) > v) return false;
      }
  for (int a = 1; a <= 12; ++a)
    for (int b = 1; b <= 12; ++b) {
      const int v = table_c(a, b);
      if (a > 1 && table_c(a - 1, b) > v) return false;
      if (b > 1 && table_c(a, b - 1) > v) return false;
    }
  return true;
}

}  // namespace ergopipe::reba
