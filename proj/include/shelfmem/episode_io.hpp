#pragma once

#include <filesystem>
#include <string>

#include "shelfmem/planner.hpp"

namespace shelfmem {

/// JSON-lines serialization of an episode: one header line, one line per
/// step, one end line. Wall-clock timings are excluded so identical seeds
/// produce byte-identical files; write_timing_csv carries them separately.
std::string episode_to_jsonl(const EpisodeLog& log);
EpisodeLog episode_from_jsonl(const std::string& text);

void write_episode_log(const EpisodeLog& log, const std::filesystem::path& path);
EpisodeLog read_episode_log(const std::filesystem::path& path);

void write_timing_csv(const EpisodeLog& log, const std::filesystem::path& path);

/// Audits the arbitration of every step: view steps with a scored push must
/// satisfy vig_nbv * delta_view > vig_push, push steps the converse. Returns
/// an empty string when consistent, else the first violation.
std::string audit_arbitration(const EpisodeLog& log, double delta_view);

}  // namespace shelfmem
