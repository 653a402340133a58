#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ecp/conformal.hpp"

namespace ecp {

struct Coverage {
  std::size_t hits = 0;
  std::size_t total = 0;
  double fraction = 0.0;
};

Coverage coverage(std::span<const PredictionSet> sets, std::span<const Label> labels);

// counts[k] = number of sets with exactly k labels, k = 0..10.
using SizeHistogram = std::array<std::size_t, kNumClasses + 1>;

SizeHistogram size_histogram(std::span<const PredictionSet> sets);
// Smallest size with the largest count.
std::size_t histogram_mode(const SizeHistogram& h);

struct ExampleRecord {
  std::size_t example_id = 0;
  LabelMask set = 0;
  Label true_label = 0;
  bool hit = false;
};

struct PredictionReport {
  Rule rule;
  double threshold = 0.0;
  std::size_t coverage_count = 0;
  std::size_t total = 0;
  SizeHistogram size_histogram{};
  std::vector<ExampleRecord> per_example;  // empty in summary mode

  double coverage_fraction() const noexcept { return total ? double(coverage_count) / double(total) : 0.0; }
};

// Precondition error on an empty run or mismatched lengths.
PredictionReport make_report(std::span<const PredictionSet> sets, std::span<const Label> labels,
                             bool keep_per_example = true);

// Two-row size/count table in the layout of the published set-size tables.
std::string render_table(const PredictionReport& report);
// size,count
std::string histogram_csv(const PredictionReport& report);
// example_id,set,true_label,hit  (set as space-separated labels)
std::string per_example_csv(const PredictionReport& report);

// Writes <stem>.txt, <stem>_sizes.csv and, unless summary-only, <stem>_sets.csv.
void write_report(const PredictionReport& report, const std::filesystem::path& dir, const std::string& stem);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

MeanStd mean_std(std::span<const double> values);

}  // namespace ecp
