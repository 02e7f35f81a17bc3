// Regenerates the committed synthetic fixture: 1000 flows, 12 features of
// which 4 (f03, f05, f08, f11) separate the classes, 650 normal / 350 attack.
#include <charconv>
#include <fstream>
#include <iostream>
#include <vector>

#include "flowlabel/rng.hpp"

namespace {

std::string fmt(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

int main(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : "data/fixture_flows.csv";
  constexpr std::size_t kRows = 1000, kAttack = 350, kFeatures = 12;
  constexpr double kShift = 5.0;
  const bool informative[kFeatures] = {false, false, true,  false, true,  false,
                                       false, true,  false, false, true,  false};

  flowlabel::Rng rng(7);
  std::vector<int> label(kRows, 0);
  for (std::size_t i = 0; i < kAttack; ++i) label[i] = 1;
  rng.shuffle(label);

  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  for (std::size_t j = 0; j < kFeatures; ++j)
    out << "f" << (j < 9 ? "0" : "") << (j + 1) << ",";
  out << "label\n";
  for (std::size_t i = 0; i < kRows; ++i) {
    for (std::size_t j = 0; j < kFeatures; ++j) {
      double v = rng.normal();
      if (informative[j] && label[i]) v += kShift;
      out << fmt(v) << ",";
    }
    out << (label[i] ? "attack" : "normal") << "\n";
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}
