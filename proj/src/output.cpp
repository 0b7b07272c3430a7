#include "synclaw/output.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "synclaw/solver.hpp"

namespace synclaw {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    write_text(path, out.str());
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(bytes));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hash_file(const std::string& path) { return fnv1a64_hex(read_file(path)); }

namespace {
std::string fmt_svg(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}
} // namespace

void write_svg_plot(const std::string& path, const SvgPlot& plot) {
    const double width = 640, height = 420;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (plot.log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
            if (first) {
                x_min = x_max = s.x[i];
                y_min = y_max = y;
                first = false;
            } else {
                x_min = std::min(x_min, s.x[i]);
                x_max = std::max(x_max, s.x[i]);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    }
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;
    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double y) {
        if (plot.log_y) y = std::log10(std::max(y, 1e-300));
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << plot.title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / n_ticks;
        const double px = sx(fx);
        svg << "<line x1=\"" << px << "\" y1=\"" << height - mb << "\" x2=\"" << px << "\" y2=\""
            << height - mb + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_svg(fx) << "</text>\n";
        const double fy = y_min + (y_max - y_min) * i / n_ticks;
        const double py = height - mb - (fy - y_min) / (y_max - y_min) * (height - mt - mb);
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\">"
            << fmt_svg(plot.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << plot.x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">" << plot.y_label << "</text>\n";

    int legend_row = 0;
    for (const auto& s : plot.series) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (plot.log_y && !(s.y[i] > 0.0)) continue;
            pts << fmt_svg(sx(s.x[i])) << "," << fmt_svg(sy(s.y[i])) << " ";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
            << pts.str() << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = mt + 14 * legend_row++;
            svg << "<line x1=\"" << width - mr - 120 << "\" y1=\"" << ly << "\" x2=\""
                << width - mr - 100 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << width - mr - 95 << "\" y=\"" << ly + 4
                << "\" font-size=\"11\">" << s.label << "</text>\n";
        }
    }
    svg << "</svg>\n";
    write_text(path, svg.str());
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    CsvTable table;
    table.header = {"t", "l1", "l2", "lp", "linf", "boundary_flux"};
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        table.rows.push_back({traj.times[k], traj.norm_l1[k], traj.norm_l2[k], traj.norm_lp[k],
                              traj.norm_linf[k], k > 0 ? traj.boundary_flux[k - 1] : 0.0});
    write_csv(path, table);
}

namespace {
constexpr char kSnapshotMagic[8] = {'S', 'Y', 'N', 'S', 'T', 'A', 'T', '1'};
}

void write_states_binary(const std::string& path, const Trajectory& traj) {
    std::ostringstream out(std::ios::binary);
    out.write(kSnapshotMagic, 8);
    const std::int32_t n_states = static_cast<std::int32_t>(traj.states.size());
    const std::int32_t n_cells = traj.states.empty() ? 0 : traj.states.front().size();
    const double dx = traj.states.empty() ? 0.0 : traj.states.front().grid->dx;
    out.write(reinterpret_cast<const char*>(&n_states), 4);
    out.write(reinterpret_cast<const char*>(&n_cells), 4);
    out.write(reinterpret_cast<const char*>(&dx), 8);
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const std::int32_t step = traj.state_steps[s];
        out.write(reinterpret_cast<const char*>(&step), 4);
        out.write(reinterpret_cast<const char*>(traj.states[s].values.data()),
                  static_cast<std::streamsize>(8 * traj.states[s].values.size()));
    }
    write_text(path, out.str());
}

StateSnapshots read_states_binary(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 24 || std::memcmp(bytes.data(), kSnapshotMagic, 8) != 0)
        throw std::runtime_error("not a state snapshot file: " + path);
    StateSnapshots out;
    std::int32_t n_states = 0;
    std::memcpy(&n_states, bytes.data() + 8, 4);
    std::int32_t n_cells = 0;
    std::memcpy(&n_cells, bytes.data() + 12, 4);
    std::memcpy(&out.dx, bytes.data() + 16, 8);
    out.n_cells = n_cells;
    std::size_t offset = 24;
    for (std::int32_t s = 0; s < n_states; ++s) {
        if (offset + 4 + 8 * static_cast<std::size_t>(n_cells) > bytes.size())
            throw std::runtime_error("truncated state snapshot file: " + path);
        std::int32_t step = 0;
        std::memcpy(&step, bytes.data() + offset, 4);
        offset += 4;
        std::vector<double> state(static_cast<std::size_t>(n_cells));
        std::memcpy(state.data(), bytes.data() + offset, 8 * state.size());
        offset += 8 * state.size();
        out.steps.push_back(step);
        out.states.push_back(std::move(state));
    }
    return out;
}

Manifest write_manifest(const std::string& dir, const std::string& experiment,
                        const std::string& cfg_hash, const std::string& cfg_text,
                        std::vector<std::string> file_names) {
    Manifest m;
    m.experiment = experiment;
    m.config_hash = cfg_hash;
    m.config_text = cfg_text;
    std::sort(file_names.begin(), file_names.end());
    for (const auto& name : file_names) {
        const std::string bytes = read_file(dir + "/" + name);
        m.files.push_back({name, bytes.size(), fnv1a64_hex(bytes)});
    }
    nlohmann::json j;
    j["schema_version"] = m.schema_version;
    j["experiment"] = m.experiment;
    j["config_hash"] = m.config_hash;
    j["config_text"] = m.config_text;
    j["files"] = nlohmann::json::array();
    for (const auto& f : m.files)
        j["files"].push_back({{"name", f.name}, {"bytes", f.bytes}, {"hash", f.hash}});
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
    return m;
}

Manifest load_manifest(const std::string& path) {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    Manifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.experiment = j.at("experiment").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config_text = j.at("config_text").get<std::string>();
    for (const auto& f : j.at("files"))
        m.files.push_back({f.at("name").get<std::string>(), f.at("bytes").get<std::uint64_t>(),
                           f.at("hash").get<std::string>()});
    return m;
}

} // namespace synclaw
