// Deterministic artifact emission: CSV tables, minimal SVG line plots, and
// the hashed run manifest.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace synclaw {

std::string format_double(double x);  // %.17g

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

/// Writes raw bytes; all artifact writers funnel through here so line
/// endings stay byte-stable across platforms.
void write_text(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string hash_file(const std::string& path);
std::string read_file(const std::string& path);

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x, y;
};

struct SvgPlot {
    std::string title;
    std::string x_label, y_label;
    bool log_y = false;
    std::vector<SvgSeries> series;
};

void write_svg_plot(const std::string& path, const SvgPlot& plot);

// forward declaration; defined in solver.hpp
struct Trajectory;

/// Standard trajectory dump: t, ||u||_1, ||u||_2, ||u||_p, ||u||_inf,
/// boundary_flux (one row per recorded step).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Binary state snapshots at the trajectory's configured stride.
void write_states_binary(const std::string& path, const Trajectory& traj);
struct StateSnapshots {
    int n_cells = 0;
    double dx = 0.0;
    std::vector<int> steps;
    std::vector<std::vector<double>> states;
};
StateSnapshots read_states_binary(const std::string& path);

struct ManifestEntry {
    std::string name;
    std::uint64_t bytes = 0;
    std::string hash;
};

struct Manifest {
    int schema_version = 1;
    std::string experiment;
    std::string config_hash;
    std::string config_text;
    std::vector<ManifestEntry> files;  // sorted by name
};

/// Hashes every listed file in dir and writes dir/manifest.json.
Manifest write_manifest(const std::string& dir, const std::string& experiment,
                        const std::string& cfg_hash, const std::string& cfg_text,
                        std::vector<std::string> file_names);

Manifest load_manifest(const std::string& path);

} // namespace synclaw
