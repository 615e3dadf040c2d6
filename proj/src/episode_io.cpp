#include "shelfmem/episode_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shelfmem/errors.hpp"

namespace shelfmem {

using nlohmann::json;

namespace {

json vec2_json(Vec2 v) { return {v.x, v.y}; }
json vec3_json(Vec3 v) { return {v.x, v.y, v.z}; }
Vec2 vec2_from(const json& j) { return {j.at(0), j.at(1)}; }
Vec3 vec3_from(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }

json step_to_json(const StepRecord& s) {
  json j;
  j["type"] = "step";
  j["t"] = s.t;
  j["action"] = s.action;
  j["feasible"] = s.feasible;
  j["pose"] = {{"cam", vec3_json(s.pose.cam)}, {"target", vec3_json(s.pose.target)}};
  j["normalized"] = s.normalized_action;
  j["vig_nbv"] = s.vig_nbv;
  if (s.vig_push)
    j["vig_push"] = *s.vig_push;
  else
    j["vig_push"] = nullptr;
  j["push_gate"] = s.push_gate;
  if (s.push) {
    j["push"] = {{"start", vec2_json(s.push->start)},
                 {"direction", vec2_json(s.push->direction)},
                 {"length", s.push->length},
                 {"target_object", s.push->target_object},
                 {"predicted_vig", s.push->predicted_vig}};
  }
  if (s.outcome) {
    json disp = json::object();
    for (const auto& [id, d] : s.outcome->displacements)
      disp[std::to_string(id)] = vec2_json(d);
    j["outcome"] = {{"pushed_object", s.outcome->pushed_object},
                    {"displacements", disp},
                    {"fallen", s.outcome->fallen},
                    {"secondary_contacts", s.outcome->secondary_contacts}};
  }
  if (s.telemetry) {
    json targets = json::array();
    for (const CellIdx& c : s.telemetry->targets) targets.push_back({c.r, c.c});
    j["telemetry"] = {{"targets", targets},
                      {"corridors_evaluated", s.telemetry->corridors_evaluated},
                      {"best_corridor_scores", s.telemetry->best_corridor_scores},
                      {"selected_occluders", s.telemetry->selected_occluders},
                      {"candidate_vigs", s.telemetry->candidate_vigs}};
  }
  j["reward"] = {{"uncertainty", s.r_uncertainty},
                 {"repeat", s.r_repeat},
                 {"total", s.reward}};
  j["metrics"] = {{"occ_miou", s.occ_miou},
                  {"sem_miou", s.sem_miou},
                  {"certainty", s.certainty},
                  {"mean_u_o", s.mean_u_o},
                  {"mean_u_s", s.mean_u_s}};
  return j;
}

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.t = j.at("t");
  s.action = j.at("action");
  s.feasible = j.value("feasible", true);
  s.pose.cam = vec3_from(j.at("pose").at("cam"));
  s.pose.target = vec3_from(j.at("pose").at("target"));
  const auto& na = j.at("normalized");
  for (int i = 0; i < 6; ++i) s.normalized_action[i] = na.at(i);
  s.vig_nbv = j.at("vig_nbv");
  if (!j.at("vig_push").is_null()) s.vig_push = j.at("vig_push").get<double>();
  s.push_gate = j.value("push_gate", "");
  if (j.contains("push")) {
    PushCandidate p;
    p.start = vec2_from(j["push"].at("start"));
    p.direction = vec2_from(j["push"].at("direction"));
    p.length = j["push"].at("length");
    p.target_object = j["push"].at("target_object");
    p.predicted_vig = j["push"].value("predicted_vig", 0.0);
    s.push = p;
  }
  if (j.contains("outcome")) {
    PushOutcome o;
    o.pushed_object = j["outcome"].at("pushed_object");
    for (const auto& [key, val] : j["outcome"].at("displacements").items())
      o.displacements[std::stoi(key)] = vec2_from(val);
    for (const auto& id : j["outcome"].at("fallen")) o.fallen.insert(id.get<int>());
    o.secondary_contacts = j["outcome"].at("secondary_contacts");
    s.outcome = o;
  }
  if (j.contains("telemetry")) {
    PushTelemetry t;
    for (const auto& c : j["telemetry"].at("targets"))
      t.targets.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    t.corridors_evaluated = j["telemetry"].value("corridors_evaluated", 0);
    t.best_corridor_scores =
        j["telemetry"].value("best_corridor_scores", std::vector<double>{});
    t.selected_occluders =
        j["telemetry"].value("selected_occluders", std::vector<int>{});
    t.candidate_vigs = j["telemetry"].value("candidate_vigs", std::vector<double>{});
    s.telemetry = t;
  }
  s.r_uncertainty = j.at("reward").at("uncertainty");
  s.r_repeat = j.at("reward").at("repeat");
  s.reward = j.at("reward").at("total");
  s.occ_miou = j.at("metrics").at("occ_miou");
  s.sem_miou = j.at("metrics").at("sem_miou");
  s.certainty = j.at("metrics").at("certainty");
  s.mean_u_o = j.at("metrics").at("mean_u_o");
  s.mean_u_s = j.at("metrics").at("mean_u_s");
  return s;
}

}  // namespace

std::string episode_to_jsonl(const EpisodeLog& log) {
  std::ostringstream out;
  json header;
  header["type"] = "header";
  header["version"] = 1;
  header["scene_seed"] = log.scene_seed;
  header["planner_seed"] = log.planner_seed;
  header["method"] = log.method;
  header["grid"] = {{"rows", log.grid.rows},
                    {"cols", log.grid.cols},
                    {"levels", log.grid.levels},
                    {"resolution", log.grid.resolution},
                    {"n_classes", log.grid.n_classes}};
  header["budget"] = log.budget;
  out << header.dump() << '\n';
  for (const StepRecord& s : log.steps) out << step_to_json(s).dump() << '\n';
  json end;
  end["type"] = "end";
  end["reason"] = log.terminal_reason;
  end["error"] = log.error;
  end["steps"] = log.steps.size();
  end["clamp_warnings"] = log.clamp_warnings;
  end["final"] = {{"occ_miou", log.final_occ_miou},
                  {"sem_miou", log.final_sem_miou},
                  {"certainty", log.final_certainty}};
  out << end.dump() << '\n';
  return out.str();
}

EpisodeLog episode_from_jsonl(const std::string& text) {
  EpisodeLog log;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError(std::string("episode log parse error: ") + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      saw_header = true;
      log.scene_seed = j.at("scene_seed");
      log.planner_seed = j.at("planner_seed");
      log.method = j.at("method");
      log.grid.rows = j.at("grid").at("rows");
      log.grid.cols = j.at("grid").at("cols");
      log.grid.levels = j.at("grid").at("levels");
      log.grid.resolution = j.at("grid").at("resolution");
      log.grid.n_classes = j.at("grid").at("n_classes");
      log.budget = j.at("budget");
    } else if (type == "step") {
      log.steps.push_back(step_from_json(j));
    } else if (type == "end") {
      log.terminal_reason = j.at("reason");
      log.error = j.value("error", "");
      log.clamp_warnings = j.value("clamp_warnings", 0);
      log.final_occ_miou = j.at("final").at("occ_miou");
      log.final_sem_miou = j.at("final").at("sem_miou");
      log.final_certainty = j.at("final").at("certainty");
    }
  }
  if (!saw_header) throw IoError("episode log missing header line");
  return log;
}

void write_episode_log(const EpisodeLog& log, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << episode_to_jsonl(log);
  if (!f) throw IoError("write failed: " + path.string());
}

EpisodeLog read_episode_log(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return episode_from_jsonl(text);
}

void write_timing_csv(const EpisodeLog& log, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "t,action,view_select_s,push_select_s,execute_s\n";
  f.precision(9);
  for (const StepRecord& s : log.steps) {
    f << s.t << ',' << s.action << ',' << s.view_select_seconds << ','
      << s.push_select_seconds << ',' << s.execute_seconds << '\n';
  }
}

std::string audit_arbitration(const EpisodeLog& log, double delta_view) {
  for (const StepRecord& s : log.steps) {
    if (s.action == "push") {
      if (!s.vig_push)
        return "step " + std::to_string(s.t) + ": push without scored candidates";
      if (s.vig_nbv * delta_view > *s.vig_push)
        return "step " + std::to_string(s.t) +
               ": pushed although vig_nbv * delta exceeds vig_push";
    } else if (s.vig_push) {
      if (!(s.vig_nbv * delta_view > *s.vig_push))
        return "step " + std::to_string(s.t) +
               ": viewed although vig_push dominates";
    }
  }
  return "";
}

}  // namespace shelfmem
