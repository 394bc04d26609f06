#include "chemid/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "chemid/error.hpp"
#include "chemid/lookup_engine.hpp"

namespace chemid {

namespace {

using ojson = nlohmann::ordered_json;

std::string file_safe(std::string s) {
  for (char& c : s) {
    if (c == '%') c = 'p';
    else if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
  return out;
}

}  // namespace

double accuracy(std::size_t n_correct, std::size_t n_total) {
  if (n_total == 0) throw std::invalid_argument("accuracy over zero trials");
  if (n_correct > n_total) throw std::invalid_argument("more correct answers than trials");
  return 100.0 * static_cast<double>(n_correct) / static_cast<double>(n_total);
}

std::string rate_label(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", rate * 100.0);
  return buf;
}

AccuracyReport summarize_hits(std::string model_id, std::span<const VictimRecord> victims,
                              const std::vector<bool>& hits) {
  if (victims.empty()) throw std::invalid_argument("evaluation over an empty victim set");
  if (hits.size() != victims.size()) throw std::invalid_argument("hit vector does not match victims");

  AccuracyReport r;
  r.model_id = std::move(model_id);
  r.rate = victims.front().rate;
  r.rate_label = rate_label(r.rate);
  r.n_total = victims.size();

  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::pair<std::size_t, std::size_t>> tallies;  // (correct, total)
  for (std::size_t i = 0; i < victims.size(); ++i) {
    auto [it, inserted] = slot.emplace(victims[i].true_chemical, tallies.size());
    if (inserted) {
      tallies.emplace_back(0, 0);
      r.per_chemical.emplace_back(victims[i].true_chemical, 0.0);
    }
    auto& t = tallies[it->second];
    ++t.second;
    if (hits[i]) {
      ++t.first;
      ++r.n_correct;
    }
  }

  std::vector<double> fractions;
  fractions.reserve(tallies.size());
  for (std::size_t c = 0; c < tallies.size(); ++c) {
    const double f = static_cast<double>(tallies[c].first) / static_cast<double>(tallies[c].second);
    r.per_chemical[c].second = f;
    fractions.push_back(f);
  }
  r.overall = accuracy(r.n_correct, r.n_total) / 100.0;
  const auto [lo, hi] = std::minmax_element(fractions.begin(), fractions.end());
  r.min = *lo;
  r.max = *hi;
  r.kde = estimate_kde(fractions, kAccuracyKdeGrid);
  return r;
}

AccuracyReport evaluate_model(std::string model_id, const HitTest& hit, std::span<const VictimRecord> victims) {
  std::vector<bool> hits;
  hits.reserve(victims.size());
  for (const auto& v : victims) hits.push_back(hit(v));
  return summarize_hits(std::move(model_id), victims, hits);
}

AccuracyReport evaluate_lookup(const ChemicalDatabase& db, std::span<const VictimRecord> victims) {
  return evaluate_model("lookup", [&db](const VictimRecord& v) { return lookup_hit(db, v); }, victims);
}

AccuracyReport evaluate_tree(const TrainedTree& tree, std::span<const VictimRecord> victims) {
  return evaluate_model(
      "tree", [&tree](const VictimRecord& v) { return predict_tree(tree, v.observed) == v.true_chemical; }, victims);
}

AccuracyReport evaluate_ann(const NetworkWeights& weights, std::span<const VictimRecord> victims) {
  std::vector<SymptomProfile> observed;
  observed.reserve(victims.size());
  for (const auto& v : victims) observed.push_back(v.observed);
  const auto predicted = predict_ann_batch(weights, observed);
  std::vector<bool> hits;
  hits.reserve(victims.size());
  for (std::size_t i = 0; i < victims.size(); ++i) {
    hits.push_back(weights.classes[predicted[i]] == victims[i].true_chemical);
  }
  return summarize_hits("ann", victims, hits);
}

// ---------------------------------------------------------------------------
// Report persistence

ojson report_to_json(const AccuracyReport& r) {
  ojson per = ojson::object();
  for (const auto& [name, f] : r.per_chemical) per[name] = f;
  return ojson{{"model", r.model_id},
               {"rate", r.rate_label},
               {"rate_value", r.rate},
               {"n_correct", r.n_correct},
               {"n_total", r.n_total},
               {"overall", r.overall},
               {"overall_percent", 100.0 * r.overall},
               {"min", r.min},
               {"max", r.max},
               {"per_chemical", std::move(per)},
               {"kde", ojson{{"grid", r.kde.grid}, {"density", r.kde.density}, {"bandwidth", r.kde.bandwidth}}}};
}

AccuracyReport report_from_json(const ojson& j) {
  try {
    AccuracyReport r;
    r.model_id = j.at("model").get<std::string>();
    r.rate_label = j.at("rate").get<std::string>();
    r.rate = j.value("rate_value", 0.0);
    r.n_correct = j.value("n_correct", std::size_t{0});
    r.n_total = j.value("n_total", std::size_t{0});
    r.overall = j.at("overall").get<double>();
    r.min = j.at("min").get<double>();
    r.max = j.at("max").get<double>();
    for (const auto& [name, f] : j.at("per_chemical").items()) r.per_chemical.emplace_back(name, f.get<double>());
    const auto& k = j.at("kde");
    r.kde.grid = k.at("grid").get<std::vector<double>>();
    r.kde.density = k.at("density").get<std::vector<double>>();
    r.kde.bandwidth = k.at("bandwidth").get<double>();
    return r;
  } catch (const ojson::exception& e) {
    throw DataError(std::string("malformed accuracy report: ") + e.what());
  }
}

void save_report_file(const AccuracyReport& r, const std::string& path) {
  auto out = open_out(path);
  out << report_to_json(r).dump(1) << '\n';
}

AccuracyReport load_report_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report file '" + path + "'");
  try {
    return report_from_json(ojson::parse(in));
  } catch (const ojson::parse_error& e) {
    throw DataError(std::string("report file is not JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Comparison

ComparisonSummary comparison_report(std::span<const AccuracyReport> reports) {
  if (reports.empty()) throw std::invalid_argument("comparison needs at least one report");
  ComparisonSummary s;

  std::map<double, std::string> rate_order;
  for (const auto& r : reports) {
    if (std::find(s.models.begin(), s.models.end(), r.model_id) == s.models.end()) s.models.push_back(r.model_id);
    rate_order.emplace(r.rate, r.rate_label);
  }
  std::vector<double> rate_values;
  for (const auto& [v, label] : rate_order) {
    rate_values.push_back(v);
    s.rates.push_back(label);
  }
  s.grid.assign(s.models.size(), std::vector<double>(s.rates.size(), -1.0));
  for (const auto& r : reports) {
    const auto m = static_cast<std::size_t>(std::find(s.models.begin(), s.models.end(), r.model_id) - s.models.begin());
    const auto k = static_cast<std::size_t>(std::find(rate_values.begin(), rate_values.end(), r.rate) - rate_values.begin());
    s.grid[m][k] = r.overall;
  }

  const auto lookup_it = std::find(s.models.begin(), s.models.end(), "lookup");
  if (lookup_it != s.models.end() && s.models.size() > 1) {
    const auto li = static_cast<std::size_t>(lookup_it - s.models.begin());
    bool dominated = true;
    bool compared = false;
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      if (m == li) continue;
      for (std::size_t k = 0; k < s.rates.size(); ++k) {
        if (s.grid[li][k] < 0.0 || s.grid[m][k] < 0.0) continue;
        compared = true;
        if (!(s.grid[li][k] < s.grid[m][k])) dominated = false;
      }
    }
    s.lookup_dominated = compared && dominated;
  }

  ojson cells = ojson::array();
  for (const auto& r : reports) {
    cells.push_back(ojson{{"model", r.model_id},
                          {"rate", r.rate_label},
                          {"overall", r.overall},
                          {"min", r.min},
                          {"max", r.max},
                          {"n_total", r.n_total}});
  }
  s.document = ojson{{"models", s.models},
                     {"rates", s.rates},
                     {"grid", s.grid},
                     {"lookup_dominated", s.lookup_dominated},
                     {"reports", std::move(cells)}};
  return s;
}

ComparisonSummary write_comparison(std::span<const AccuracyReport> reports, const std::string& dir) {
  ComparisonSummary s = comparison_report(reports);
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);

  {
    auto out = open_out(root / "comparison.json");
    out << s.document.dump(1) << '\n';
  }
  {
    auto out = open_out(root / "accuracy_grid.csv");
    out << "model";
    for (const auto& r : s.rates) out << ',' << r;
    out << '\n';
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      out << s.models[m];
      for (double v : s.grid[m]) {
        out << ',';
        if (v >= 0.0) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6f", 100.0 * v);
          out << buf;
        }
      }
      out << '\n';
    }
  }
  for (const auto& r : reports) {
    auto out = open_out(root / ("kde_" + file_safe(r.model_id) + "_" + file_safe(r.rate_label) + ".csv"));
    out << "accuracy,density\n";
    for (std::size_t i = 0; i < r.kde.grid.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f,%.9g\n", r.kde.grid[i], r.kde.density[i]);
      out << buf;
    }
  }
  {
    // Grouped bar chart: one group per rate, one bar per model.
    constexpr double kWidth = 640, kHeight = 360, kLeft = 50, kBottom = 40, kTop = 20;
    const double plot_h = kHeight - kBottom - kTop;
    const double group_w = (kWidth - kLeft - 20) / static_cast<double>(s.rates.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(s.models.size());
    static const char* kColors[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948"};
    auto out = open_out(root / "accuracy_bars.svg");
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                  "font-size=\"11\">\n",
                  kWidth, kHeight);
    out << buf;
    for (int tick = 0; tick <= 100; tick += 25) {
      const double y = kTop + plot_h * (1.0 - tick / 100.0);
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                    "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%d%%</text>\n",
                    kLeft, y, kWidth - 20, y, kLeft - 4, y + 4, tick);
      out << buf;
    }
    for (std::size_t k = 0; k < s.rates.size(); ++k) {
      const double gx = kLeft + group_w * static_cast<double>(k) + group_w * 0.1;
      for (std::size_t m = 0; m < s.models.size(); ++m) {
        const double v = std::max(0.0, s.grid[m][k]);
        const double h = plot_h * v;
        std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n",
                      gx + bar_w * static_cast<double>(m), kTop + plot_h - h, bar_w, h, kColors[m % 6]);
        out << buf;
      }
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">", gx + group_w * 0.4,
                    kHeight - kBottom + 16);
      out << buf << s.rates[k] << "</text>\n";
    }
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>"
                    "<text x=\"%.1f\" y=\"%.1f\">",
                    kLeft + 90.0 * static_cast<double>(m), kHeight - 14, kColors[m % 6],
                    kLeft + 90.0 * static_cast<double>(m) + 14, kHeight - 5);
      out << buf << s.models[m] << "</text>\n";
    }
    out << "</svg>\n";
  }
  return s;
}

}  // namespace chemid
