#pragma once

#include <cstdint>
#include <string>

namespace potlab {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct RunConfig {
    std::string command;
    std::string config_path;  // JSON parameter document (optional for some commands)
    std::uint64_t seed = 1;
    std::string out_path;  // empty: report to stdout
    int threads = 0;       // 0: resolve from POTLAB_THREADS, default 1
};

// Dispatches a command to the library pipelines and emits one JSON report (plus a CSV
// sidecar for sweeps). Returns the process exit code: 0 all assertions pass, 1 input
// error, 2 a named invariant failed.
int run(const RunConfig& cfg);

}  // namespace potlab
