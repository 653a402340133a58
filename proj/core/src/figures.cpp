#include "ecp/figures.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "ecp/errors.hpp"

namespace ecp {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void write_pgm(const std::filesystem::path& path, std::span<const std::uint8_t> pixels, std::size_t width,
               std::size_t height) {
  if (pixels.size() != width * height) throw Error(ErrorKind::consistency, "raster size mismatch");
  auto out = open_out(path);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), std::streamsize(pixels.size()));
  if (!out) throw Error(ErrorKind::io, "short write on " + path.string());
}

void render_digit(std::span<const std::uint8_t> image, const std::filesystem::path& path) {
  if (image.size() != kImageBytes) throw Error(ErrorKind::precondition, "digit raster needs 784 bytes");
  write_pgm(path, image, kImageCols, kImageRows);
}

LossPlotFiles loss_plots(const CalibrationScores& cal, const std::filesystem::path& dir, std::size_t bins) {
  LossPlotFiles files{dir / "calibration_histogram.csv", dir / "calibration_sorted.csv"};
  const ScoreHistogram h = score_histogram(cal, bins);
  {
    auto out = open_out(files.histogram);
    out << "bin,lo,hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << b << ',' << num(h.lo + double(b) * h.width) << ',' << num(h.lo + double(b + 1) * h.width) << ','
          << h.counts[b] << '\n';
    }
  }
  {
    auto out = open_out(files.sorted);
    out << "rank,score\n";
    const auto s = cal.scores();
    for (std::size_t i = 0; i < s.size(); ++i) out << i + 1 << ',' << num(s[i]) << '\n';
  }
  return files;
}

void write_scores_csv(std::span<const double> scores, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "index,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) out << i << ',' << num(scores[i]) << '\n';
}

void write_embedding_csv(const Embedding2D& emb, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "index,x,y,label\n";
  for (Eigen::Index i = 0; i < emb.points.rows(); ++i) {
    out << i << ',' << num(emb.points(i, 0)) << ',' << num(emb.points(i, 1)) << ','
        << int(emb.labels[std::size_t(i)]) << '\n';
  }
}

}  // namespace ecp
