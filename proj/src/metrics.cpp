#include "shelfmem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "shelfmem/errors.hpp"
#include "shelfmem/planner.hpp"

namespace shelfmem {

double miou(const Grid2<int>& pred, const Grid2<int>& gt, int n_classes) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw ContractError("miou: shapes differ");
  std::vector<long> inter(n_classes, 0), pred_n(n_classes, 0), gt_n(n_classes, 0);
  const auto pd = pred.data();
  const auto gd = gt.data();
  for (std::size_t i = 0; i < pd.size(); ++i) {
    const int p = pd[i], g = gd[i];
    if (p >= 0 && p < n_classes) ++pred_n[p];
    if (g >= 0 && g < n_classes) ++gt_n[g];
    if (p == g && p >= 0 && p < n_classes) ++inter[p];
  }
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (gt_n[c] == 0) continue;  // class absent from ground truth
    const long uni = pred_n[c] + gt_n[c] - inter[c];
    sum += uni > 0 ? static_cast<double>(inter[c]) / uni : 1.0;
    ++counted;
  }
  return counted > 0 ? sum / counted : 1.0;
}

double occupancy_miou(const BeliefState& belief, const Grid3<std::uint8_t>& gt,
                      double theta_occ) {
  const GridSpec& spec = belief.spec();
  if (spec.rows != gt.rows() || spec.cols != gt.cols() || spec.levels != gt.levels())
    throw ContractError("occupancy_miou: grids differ");
  const Grid2<double> height = belief.project_height_map(theta_occ);
  long inter[2] = {0, 0}, pred_n[2] = {0, 0}, gt_n[2] = {0, 0};
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const double h = height.at(r, c);
      for (int k = 0; k < spec.levels; ++k) {
        const int p = (k + 0.5) * spec.resolution < h ? 1 : 0;
        const int g = gt.at(r, c, k) ? 1 : 0;
        ++pred_n[p];
        ++gt_n[g];
        if (p == g) ++inter[p];
      }
    }
  }
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c < 2; ++c) {
    if (gt_n[c] == 0) continue;
    const long uni = pred_n[c] + gt_n[c] - inter[c];
    sum += uni > 0 ? static_cast<double>(inter[c]) / uni : 1.0;
    ++counted;
  }
  return counted > 0 ? sum / counted : 1.0;
}

namespace {

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

Stat mean_std(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (xs.size() - 1));
  }
  return s;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

RunMetrics aggregate_batch(const std::vector<EpisodeLog>& logs) {
  if (logs.empty()) throw ContractError("aggregate_batch: empty batch");
  std::vector<double> occ, sem, mad, pushes;
  std::vector<double> view_times, push_times, wall;
  int collided = 0;
  for (const EpisodeLog& log : logs) {
    occ.push_back(log.final_occ_miou);
    sem.push_back(log.final_sem_miou);
    mad.push_back(log.total_displacement());
    pushes.push_back(static_cast<double>(log.num_pushes()));
    if (log.collided()) ++collided;
    double w = 0.0;
    for (const StepRecord& s : log.steps) {
      w += s.view_select_seconds + s.push_select_seconds + s.execute_seconds;
      view_times.push_back(s.view_select_seconds);
      if (s.vig_push.has_value()) push_times.push_back(s.push_select_seconds);
    }
    wall.push_back(w);
  }
  RunMetrics m;
  m.scenes = static_cast<int>(logs.size());
  const Stat so = mean_std(occ);
  m.occ_miou_mean = so.mean;
  m.occ_miou_std = so.stddev;
  const Stat ss = mean_std(sem);
  m.sem_miou_mean = ss.mean;
  m.sem_miou_std = ss.stddev;
  const Stat sm = mean_std(mad);
  m.mad_mean = sm.mean;
  m.mad_std = sm.stddev;
  const Stat sp = mean_std(pushes);
  m.num_push_mean = sp.mean;
  m.num_push_std = sp.stddev;
  m.collision_rate = static_cast<double>(collided) / logs.size();
  m.view_select_median_s = median(view_times);
  m.push_select_median_s = median(push_times);
  const Stat sw = mean_std(wall);
  m.episode_wall_mean_s = sw.mean;
  return m;
}

std::string ComparisonReport::to_csv() const {
  std::ostringstream out;
  out << "method,scenes,occ_miou_mean,occ_miou_std,sem_miou_mean,sem_miou_std,"
         "mad_mean,mad_std,num_push_mean,num_push_std,collision_rate,"
         "view_select_median_s,push_select_median_s\n";
  out.precision(12);
  for (const MethodReport& r : methods) {
    const RunMetrics& m = r.metrics;
    out << r.method << ',' << m.scenes << ',' << m.occ_miou_mean << ','
        << m.occ_miou_std << ',' << m.sem_miou_mean << ',' << m.sem_miou_std << ','
        << m.mad_mean << ',' << m.mad_std << ',' << m.num_push_mean << ','
        << m.num_push_std << ',' << m.collision_rate << ','
        << m.view_select_median_s << ',' << m.push_select_median_s << '\n';
  }
  return out.str();
}

std::string ComparisonReport::to_json_string() const {
  nlohmann::json j;
  j["seeds"] = seeds;
  j["collision_definition"] =
      "scene counts as colliding when any push produced a secondary contact or a fall";
  j["methods"] = nlohmann::json::array();
  for (const MethodReport& r : methods) {
    const RunMetrics& m = r.metrics;
    j["methods"].push_back({{"method", r.method},
                            {"scenes", m.scenes},
                            {"occ_miou", {{"mean", m.occ_miou_mean}, {"std", m.occ_miou_std}}},
                            {"sem_miou", {{"mean", m.sem_miou_mean}, {"std", m.sem_miou_std}}},
                            {"mad", {{"mean", m.mad_mean}, {"std", m.mad_std}}},
                            {"num_push", {{"mean", m.num_push_mean}, {"std", m.num_push_std}}},
                            {"collision_rate", m.collision_rate},
                            {"view_select_median_s", m.view_select_median_s},
                            {"push_select_median_s", m.push_select_median_s},
                            {"seeds", r.seeds}});
  }
  if (methods.size() >= 2) {
    const RunMetrics& a = methods[0].metrics;
    nlohmann::json deltas = nlohmann::json::array();
    for (std::size_t i = 1; i < methods.size(); ++i) {
      const RunMetrics& b = methods[i].metrics;
      deltas.push_back({{"baseline", methods[i].method},
                        {"occ_miou", a.occ_miou_mean - b.occ_miou_mean},
                        {"sem_miou", a.sem_miou_mean - b.sem_miou_mean},
                        {"mad", a.mad_mean - b.mad_mean},
                        {"num_push", a.num_push_mean - b.num_push_mean},
                        {"collision_rate", a.collision_rate - b.collision_rate}});
    }
    j["deltas_vs_first"] = deltas;
  }
  return j.dump(2) + "\n";
}

}  // namespace shelfmem
