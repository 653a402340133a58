#include "ecp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ecp/errors.hpp"

namespace ecp {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "short write on " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

Coverage coverage(std::span<const PredictionSet> sets, std::span<const Label> labels) {
  if (sets.size() != labels.size()) {
    throw Error(ErrorKind::consistency, "coverage needs one label per prediction set");
  }
  Coverage c;
  c.total = sets.size();
  for (std::size_t i = 0; i < sets.size(); ++i) c.hits += sets[i].contains(labels[i]);
  c.fraction = c.total ? double(c.hits) / double(c.total) : 0.0;
  return c;
}

SizeHistogram size_histogram(std::span<const PredictionSet> sets) {
  SizeHistogram h{};
  for (const auto& s : sets) h[s.size()]++;
  return h;
}

std::size_t histogram_mode(const SizeHistogram& h) {
  return std::size_t(std::max_element(h.begin(), h.end()) - h.begin());
}

PredictionReport make_report(std::span<const PredictionSet> sets, std::span<const Label> labels,
                             bool keep_per_example) {
  if (sets.empty()) throw Error(ErrorKind::precondition, "no prediction sets to report");
  const Coverage c = coverage(sets, labels);
  PredictionReport r;
  r.rule = sets.front().rule;
  r.threshold = sets.front().threshold;
  r.coverage_count = c.hits;
  r.total = c.total;
  r.size_histogram = size_histogram(sets);
  if (keep_per_example) {
    r.per_example.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      r.per_example.push_back({sets[i].example_id, sets[i].labels, labels[i], sets[i].contains(labels[i])});
    }
  }
  return r;
}

std::string render_table(const PredictionReport& report) {
  const std::string head = "Size of label set";
  const std::string row = "Number of examples";
  const std::size_t label_w = std::max(head.size(), row.size());
  std::vector<std::string> counts;
  std::size_t cell_w = 2;
  for (std::size_t k = 0; k <= kNumClasses; ++k) {
    counts.push_back(std::to_string(report.size_histogram[k]));
    cell_w = std::max(cell_w, counts.back().size());
  }
  auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w - s.size(), ' ') + s; };
  auto pad_right = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };

  std::string rule_line = "Label set size distribution (" + report.rule.name() + "-test, " +
                          (report.rule.kind == Rule::Kind::p_value ? "epsilon=" : "alpha=") +
                          format_double(report.rule.level) + ", threshold=" + format_double(report.threshold) + ")\n";
  std::string rule_sep = "+" + std::string(label_w + 2, '-');
  for (std::size_t k = 0; k <= kNumClasses; ++k) rule_sep += "+" + std::string(cell_w + 2, '-');
  rule_sep += "+\n";

  std::string out = rule_line + rule_sep;
  out += "| " + pad_right(head, label_w) + " ";
  for (std::size_t k = 0; k <= kNumClasses; ++k) out += "| " + pad_left(std::to_string(k), cell_w) + " ";
  out += "|\n" + rule_sep;
  out += "| " + pad_right(row, label_w) + " ";
  for (const auto& c : counts) out += "| " + pad_left(c, cell_w) + " ";
  out += "|\n" + rule_sep;
  out += "coverage " + std::to_string(report.coverage_count) + "/" + std::to_string(report.total) + " = " +
         format_double(report.coverage_fraction()) + "\n";
  return out;
}

std::string histogram_csv(const PredictionReport& report) {
  std::string out = "size,count\n";
  for (std::size_t k = 0; k <= kNumClasses; ++k) {
    out += std::to_string(k) + "," + std::to_string(report.size_histogram[k]) + "\n";
  }
  return out;
}

std::string per_example_csv(const PredictionReport& report) {
  std::string out = "example_id,set,true_label,hit\n";
  for (const auto& e : report.per_example) {
    out += std::to_string(e.example_id) + ",";
    bool first = true;
    for (std::size_t y = 0; y < kNumClasses; ++y) {
      if ((e.set >> y) & 1u) {
        if (!first) out += ' ';
        out += char('0' + y);
        first = false;
      }
    }
    out += "," + std::to_string(int(e.true_label)) + "," + (e.hit ? "1" : "0") + "\n";
  }
  return out;
}

void write_report(const PredictionReport& report, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  write_text(dir / (stem + ".txt"), render_table(report));
  write_text(dir / (stem + "_sizes.csv"), histogram_csv(report));
  if (!report.per_example.empty()) write_text(dir / (stem + "_sets.csv"), per_example_csv(report));
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / double(values.size() - 1));
  }
  return r;
}

}  // namespace ecp
