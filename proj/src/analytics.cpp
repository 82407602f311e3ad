#include "hfo/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hfo/detail/format.hpp"
#include "hfo/error.hpp"

namespace hfo {
namespace {

using detail::fmt_double;
using detail::fmt_fixed;

struct PooledSpike {
  double t;
  int neuron;
};

} // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::TN: return "TN";
    case Outcome::TP: return "TP";
    case Outcome::FN: return "FN";
    case Outcome::FP: return "FP";
  }
  return "?";
}

double Metric::percent() const {
  if (!defined()) throw Error::internal("metric is undefined");
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

long Metric::rounded() const { return std::lround(percent()); }

std::string Metric::display() const {
  return defined() ? std::to_string(rounded()) : "--";
}

std::vector<HfoEvent> detect_hfos(const OutputRaster& raster,
                                  const std::string& channel,
                                  double merge_window_s,
                                  double min_event_span_s) {
  std::vector<PooledSpike> pooled;
  pooled.reserve(raster.total_spikes());
  for (std::size_t n = 0; n < raster.spikes.size(); ++n)
    for (double t : raster.spikes[n]) pooled.push_back({t, static_cast<int>(n)});
  std::sort(pooled.begin(), pooled.end(), [](const PooledSpike& a, const PooledSpike& b) {
    return a.t != b.t ? a.t < b.t : a.neuron < b.neuron;
  });

  std::vector<HfoEvent> events;
  std::set<int> contributors;
  std::size_t i = 0;
  while (i < pooled.size()) {
    const double start = pooled[i].t;
    double end = start;
    contributors.clear();
    contributors.insert(pooled[i].neuron);
    std::size_t j = i + 1;
    // Strict rule: a gap of exactly merge_window_s starts a new event.
    while (j < pooled.size() && pooled[j].t - pooled[j - 1].t < merge_window_s) {
      end = pooled[j].t;
      contributors.insert(pooled[j].neuron);
      ++j;
    }
    if (end - start >= min_event_span_s)
      events.push_back(
          {channel, start, end, static_cast<int>(contributors.size())});
    i = j;
  }
  return events;
}

double hfo_rate_per_min(std::size_t event_count, double interval_duration_s) {
  if (!(interval_duration_s > 0.0))
    throw Error::data("hfo_rate: interval duration must be positive");
  return static_cast<double>(event_count) * 60.0 / interval_duration_s;
}

TestRetestScore test_retest(const std::vector<HfoVector>& vectors) {
  if (vectors.size() < 2)
    throw Error::data("test_retest: needs at least two interval vectors");
  for (const auto& v : vectors)
    if (v.channels != vectors.front().channels)
      throw Error::data("test_retest: interval '" + v.interval_id +
                        "' has a mismatched channel set");

  TestRetestScore result;
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      ++pairs;
      const auto& a = vectors[i].rates_per_min;
      const auto& b = vectors[j].rates_per_min;
      const double dab = (a * b).sum();
      const double daa = (a * a).sum();
      const double dbb = (b * b).sum();
      if (daa == 0.0 || dbb == 0.0) {
        ++result.zero_pairs; // flagged; contributes 0
        continue;
      }
      if (dab == daa && dab == dbb) {
        sum += 1.0; // d/sqrt(d*d) is exactly 1; avoid the rounding detour
        continue;
      }
      sum += std::clamp(dab / std::sqrt(daa * dbb), 0.0, 1.0);
    }
  }
  result.score = sum / static_cast<double>(pairs);
  return result;
}

double percentile_linear(const Eigen::ArrayXd& values, double q) {
  if (values.size() == 0) throw Error::data("percentile: empty input");
  if (q < 0.0 || q > 1.0) throw Error::data("percentile: q outside [0,1]");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 1) return sorted.front();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - std::floor(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::string> hfo_area(const HfoVector& mean_rates) {
  if (mean_rates.channels.empty()) throw Error::data("hfo_area: no channels");
  const double p95 = percentile_linear(mean_rates.rates_per_min, 0.95);
  std::vector<std::string> area;
  for (std::size_t c = 0; c < mean_rates.channels.size(); ++c)
    if (mean_rates.rates_per_min[static_cast<Eigen::Index>(c)] > p95)
      area.push_back(mean_rates.channels[c]);
  return area;
}

Outcome classify_outcome(const std::vector<std::string>& area,
                         const std::vector<std::string>& resection,
                         int ilae_class) {
  const bool seizure_free = ilae_class == 1;
  bool contained = true; // empty area counts as contained
  for (const auto& ch : area)
    if (std::find(resection.begin(), resection.end(), ch) == resection.end()) {
      contained = false;
      break;
    }
  if (contained) return seizure_free ? Outcome::TN : Outcome::FN;
  return seizure_free ? Outcome::FP : Outcome::TP;
}

PredictionMetrics compute_metrics(const std::vector<Outcome>& classifications) {
  if (classifications.empty()) throw Error::data("compute_metrics: empty input");
  long tn = 0, tp = 0, fn = 0, fp = 0;
  for (Outcome o : classifications) {
    switch (o) {
      case Outcome::TN: ++tn; break;
      case Outcome::TP: ++tp; break;
      case Outcome::FN: ++fn; break;
      case Outcome::FP: ++fp; break;
    }
  }
  PredictionMetrics m;
  m.specificity = {tn, tn + fp};
  // Sensitivity cannot be calculated when no TP was classified (reported as
  // "--" in that case), so a missing TP zeroes the denominator.
  m.sensitivity = {tp, tp == 0 ? 0 : tp + fn};
  m.npv = {tn, tn + fn};
  m.ppv = {tp, tp + fp};
  m.accuracy = {tp + tn, tn + tp + fn + fp};
  return m;
}

std::string metrics_markdown(const std::vector<std::string>& column_labels,
                             const std::vector<PredictionMetrics>& columns) {
  if (column_labels.size() != columns.size())
    throw Error::internal("metrics_markdown: label/column count mismatch");
  std::ostringstream out;
  out << "| Metric |";
  for (const auto& label : column_labels) out << ' ' << label << " [%] |";
  out << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
  out << "\n";
  const std::pair<const char*, Metric PredictionMetrics::*> rows[] = {
      {"Specificity = TN/(TN+FP)", &PredictionMetrics::specificity},
      {"Sensitivity = TP/(TP+FN)", &PredictionMetrics::sensitivity},
      {"Negative Predictive Value = TN/(TN+FN)", &PredictionMetrics::npv},
      {"Positive Predictive Value = TP/(TP+FP)", &PredictionMetrics::ppv},
      {"Accuracy = (TP+TN)/N", &PredictionMetrics::accuracy},
  };
  for (const auto& [label, member] : rows) {
    out << "| " << label << " |";
    for (const auto& col : columns) out << ' ' << (col.*member).display() << " |";
    out << "\n";
  }
  return out.str();
}

std::string rates_svg(const std::vector<std::string>& channels,
                      const Eigen::ArrayXd& mean_rates,
                      const Eigen::ArrayXd& stderr_rates,
                      const std::string& title) {
  if (channels.empty() ||
      mean_rates.size() != static_cast<Eigen::Index>(channels.size()) ||
      stderr_rates.size() != mean_rates.size())
    throw Error::data("rates_svg: inconsistent inputs");

  const int bar_w = 34, gap = 14, margin_left = 56, margin_top = 34;
  const int plot_h = 220, margin_bottom = 58;
  const int n = static_cast<int>(channels.size());
  const int width = margin_left + n * (bar_w + gap) + gap + 10;
  const int height = margin_top + plot_h + margin_bottom;
  const double top = std::max(1e-12, (mean_rates + stderr_rates).maxCoeff());

  auto y_of = [&](double v) {
    return static_cast<double>(margin_top) +
           static_cast<double>(plot_h) * (1.0 - v / (1.05 * top));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  svg << "<text x=\"" << margin_left << "\" y=\"18\" font-family=\"sans-serif\" "
         "font-size=\"13\">" << title << "</text>\n";
  svg << "<line x1=\"" << margin_left - 6 << "\" y1=\"" << y_of(0.0)
      << "\" x2=\"" << width - 6 << "\" y2=\"" << y_of(0.0)
      << "\" stroke=\"#333\"/>\n";
  svg << "<text x=\"6\" y=\"" << margin_top + 10
      << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << fmt_fixed(1.05 * top, 2) << "/min</text>\n";
  for (int c = 0; c < n; ++c) {
    const double v = mean_rates[c];
    const double se = stderr_rates[c];
    const double x = margin_left + gap + c * (bar_w + gap);
    const double y = y_of(v);
    svg << "<rect x=\"" << fmt_fixed(x, 1) << "\" y=\"" << fmt_fixed(y, 2)
        << "\" width=\"" << bar_w << "\" height=\""
        << fmt_fixed(y_of(0.0) - y, 2) << "\" fill=\"#4878a8\"/>\n";
    if (se > 0.0) {
      const double cx = x + bar_w / 2.0;
      svg << "<line x1=\"" << fmt_fixed(cx, 1) << "\" y1=\""
          << fmt_fixed(y_of(v - se), 2) << "\" x2=\"" << fmt_fixed(cx, 1)
          << "\" y2=\"" << fmt_fixed(y_of(v + se), 2)
          << "\" stroke=\"#222\" stroke-width=\"1.5\"/>\n";
      for (double vv : {v - se, v + se})
        svg << "<line x1=\"" << fmt_fixed(cx - 5, 1) << "\" y1=\""
            << fmt_fixed(y_of(vv), 2) << "\" x2=\"" << fmt_fixed(cx + 5, 1)
            << "\" y2=\"" << fmt_fixed(y_of(vv), 2) << "\" stroke=\"#222\"/>\n";
    }
    svg << "<text x=\"" << fmt_fixed(x + bar_w / 2.0, 1) << "\" y=\""
        << margin_top + plot_h + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"middle\" transform=\"rotate(45 "
        << fmt_fixed(x + bar_w / 2.0, 1) << ' ' << margin_top + plot_h + 16
        << ")\">" << channels[static_cast<std::size_t>(c)] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string events_to_csv(const std::vector<HfoEvent>& events) {
  std::ostringstream out;
  out << "channel,start_s,end_s,neuron_count\n";
  for (const auto& e : events)
    out << e.channel << ',' << fmt_double(e.start_s) << ',' << fmt_double(e.end_s)
        << ',' << e.neuron_count << "\n";
  return out.str();
}

} // namespace hfo
