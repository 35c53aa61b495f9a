#pragma once

#include "mmlink/halo.hpp"

#include <istream>
#include <string>

namespace mmlink {

// Plain-text experiment description, `key = value` lines with '#' comments:
//   role (sender|echo|in-process), peer_address, video_port, audio_port,
//   chat_port, video, audio, audio_rate, audio_channels, chat_count,
//   link_config (path to a link model file), min_psnr_db, max_loss_fraction,
//   max_rtt_ms, seed, timeout_s
// Relative `video`/`audio`/`link_config` paths resolve against the config
// file's directory. Unknown keys are errors. Throws FormatError.
struct Experiment {
    std::string role = "sender";
    ExperimentConfig config;
};

Experiment parseExperimentConfig(std::istream& in, const std::string& sourceName = "<stream>",
                                 const std::string& baseDir = "");
Experiment loadExperimentConfig(const std::string& path);

} // namespace mmlink
