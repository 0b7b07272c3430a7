// Reproducible experiment driver: executes the named experiment across
// seeds, emits CSV/JSON/SVG artifacts plus a hashed manifest, and replays
// manifests for byte-exact verification.
#pragma once

#include <string>

#include "synclaw/config.hpp"
#include "synclaw/output.hpp"

namespace synclaw {

struct RunOptions {
    int workers = 1;
    std::string output_root;  // empty = current directory; env SYNCLAW_OUTPUT_ROOT overrides
};

struct RunResult {
    int status = 0;
    std::string output_dir;
    std::string manifest_path;
    std::string summary_json;  // serialized summary for programmatic use
};

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct ReplayResult {
    bool pass = false;
    std::string first_mismatch_file;
    std::string detail;  // first differing value / offset, or hash mismatch note
};

/// Re-runs the embedded config into a scratch directory and compares every
/// listed artifact hash (and bytes, when the original file is present).
ReplayResult replay(const std::string& manifest_path, const RunOptions& opts = {});

/// Resolves opts.output_root against the environment fallback.
std::string resolve_output_root(const RunOptions& opts);

} // namespace synclaw
