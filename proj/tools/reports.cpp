#include "reports.hpp"

#include <sstream>

#include "market_io.hpp"

namespace marstab::io {

using nlohmann::json;

std::string fmt6(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string describe_path(const PathOfRemarriages& path) {
  std::ostringstream os;
  os << (path.is_cycle ? "cycle" : path.is_single_option() ? "single option" : "path");
  os << ":";
  for (const PairKey& e : path.edges) os << " " << to_string(e);
  return os.str();
}

json path_to_json(const PathOfRemarriages& path) {
  json j;
  j["kind"] = path.is_cycle ? "cycle" : path.is_single_option() ? "single" : "path";
  j["couples"] = path.couples;
  json edges = json::array();
  for (const PairKey& e : path.edges) edges.push_back(pair_to_json(e));
  j["edges"] = std::move(edges);
  return j;
}

namespace {

const char* status_name(lp::Status st) {
  switch (st) {
    case lp::Status::Optimal: return "optimal";
    case lp::Status::Infeasible: return "infeasible";
    case lp::Status::Unbounded: return "unbounded";
    case lp::Status::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

}  // namespace

json index_report_json(const IndexReport& rep) {
  json j;
  j["status"] = status_name(rep.status);
  if (!rep.detail.empty()) j["detail"] = rep.detail;
  j["average"] = rep.average;
  json s = json::array();
  for (const auto& [key, val] : rep.s) {
    json e = pair_to_json(key);
    e["s"] = val;
    s.push_back(std::move(e));
  }
  j["s"] = std::move(s);
  return j;
}

std::string index_report_csv(const IndexReport& rep) {
  std::ostringstream os;
  os << "m,w,s\n";
  for (const auto& [key, val] : rep.s) {
    os << (key.man == PairKey::kEmpty ? "∅" : std::to_string(key.man)) << ","
       << (key.woman == PairKey::kEmpty ? "∅" : std::to_string(key.woman)) << ","
       << fmt6(val) << "\n";
  }
  os << "average,," << fmt6(rep.average) << "\n";
  return os.str();
}

json bounds_json(const SharingBounds& model, const SharingBounds& naive) {
  json j;
  j["status"] = status_name(model.status);
  if (!model.detail.empty()) j["detail"] = model.detail;
  json rows = json::array();
  for (size_t c = 0; c < model.couples.size(); ++c) {
    const CoupleBounds& b = model.couples[c];
    const CoupleBounds& n = naive.couples[c];
    json e;
    e["couple"] = c;
    e["lower"] = b.lower_money;
    e["upper"] = b.upper_money;
    e["lower_frac"] = b.lower_frac;
    e["upper_frac"] = b.upper_frac;
    e["width_frac"] = b.width_frac();
    e["naive_lower_frac"] = n.lower_frac;
    e["naive_upper_frac"] = n.upper_frac;
    e["naive_width_frac"] = n.width_frac();
    rows.push_back(std::move(e));
  }
  j["couples"] = std::move(rows);
  j["mean_width"] = width_stats(model).mean;
  j["naive_mean_width"] = width_stats(naive).mean;
  return j;
}

std::string bounds_csv(const SharingBounds& model, const SharingBounds& naive) {
  std::ostringstream os;
  os << "couple,lower,upper,lower_frac,upper_frac,width_frac,naive_width_frac\n";
  for (size_t c = 0; c < model.couples.size(); ++c) {
    const CoupleBounds& b = model.couples[c];
    os << c << "," << fmt6(b.lower_money) << "," << fmt6(b.upper_money) << ","
       << fmt6(b.lower_frac) << "," << fmt6(b.upper_frac) << "," << fmt6(b.width_frac())
       << "," << fmt6(naive.couples[c].width_frac()) << "\n";
  }
  return os.str();
}

json experiment_json(const sim::ExperimentReport& rep) {
  json j;
  j["seed"] = rep.seed;
  j["draws"] = rep.draws;
  json cells = json::array();
  for (const auto& c : rep.cells) {
    json e;
    e["scenario"] = c.scenario;
    e["alpha"] = c.alpha;
    e["regime"] = c.regime;
    e["index"] = {{"mean", c.index.mean},
                  {"min", c.index.min},
                  {"median", c.index.median},
                  {"max", c.index.max}};
    e["width"] = {{"mean", c.width.mean},
                  {"min", c.width.min},
                  {"median", c.width.median},
                  {"max", c.width.max}};
    e["failures"] = c.failures;
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  return j;
}

std::string experiment_csv(const sim::ExperimentReport& rep) {
  std::ostringstream os;
  os << "scenario,alpha,regime,index_mean,index_min,index_median,index_max,"
        "width_mean,width_min,width_median,width_max,failures\n";
  for (const auto& c : rep.cells) {
    os << c.scenario << "," << fmt6(c.alpha) << "," << c.regime << ","
       << fmt6(c.index.mean) << "," << fmt6(c.index.min) << "," << fmt6(c.index.median)
       << "," << fmt6(c.index.max) << "," << fmt6(c.width.mean) << "," << fmt6(c.width.min)
       << "," << fmt6(c.width.median) << "," << fmt6(c.width.max) << "," << c.failures
       << "\n";
  }
  return os.str();
}

}  // namespace marstab::io
