#pragma once

// Flat key=value run configuration, CSV slice emitters, 16-bit PGM carpet
// images, and revival report serialization. All emitters produce byte-exact
// deterministic output for identical inputs.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcarpet/analysis.hpp"
#include "qcarpet/grid.hpp"
#include "qcarpet/screen.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

struct RunConfig {
    double L = 0.0;
    double hbar_over_m = 1.0;
    double t_measure = 0.0;
    double y0 = 0.0;
    double a = 0.0;
    long N = 0;
    double k_x = 1.0;
    long y_points = 4096;
    bool y_points_set = false;   // carpets default to 1024 when left implicit
    long t_points = 1024;
    std::vector<double> t_list;
    std::vector<double> d_list;
    std::string out_dir = ".";
    std::string format = "both";   // csv | pgm | both

    WellConfig well() const { return WellConfig(L, hbar_over_m, t_measure); }
    SlitAperture slit() const { return SlitAperture(y0, a); }
    BeamConfig beam() const { return BeamConfig(k_x, well()); }
    long carpet_y_points() const { return y_points_set ? y_points : 1024; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char)s[b])) ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& v) {
    const char* c = v.c_str();
    char* end = nullptr;
    double x = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw validation_error("config: key '" + key + "': unparsable number '" + v + "'");
    return x;
}

inline long parse_long(const std::string& key, const std::string& v) {
    const char* c = v.c_str();
    char* end = nullptr;
    long x = std::strtol(c, &end, 10);
    if (end == c || *end != '\0')
        throw validation_error("config: key '" + key + "': unparsable integer '" + v + "'");
    return x;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw validation_error("config: key '" + key + "': empty list entry");
        out.push_back(parse_double(key, item));
    }
    return out;
}

inline std::string fmt15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    static const std::set<std::string> known = {
        "L", "hbar_over_m", "t_measure", "y0", "a", "N", "k_x",
        "y_points", "t_points", "t_list", "d_list", "out_dir", "format"};
    RunConfig cfg;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config: line " + std::to_string(lineno) +
                                   ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (!known.count(key))
            throw validation_error("config: unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw validation_error("config: duplicate key '" + key + "'");
        if (key == "L") cfg.L = detail::parse_double(key, val);
        else if (key == "hbar_over_m") cfg.hbar_over_m = detail::parse_double(key, val);
        else if (key == "t_measure") cfg.t_measure = detail::parse_double(key, val);
        else if (key == "y0") cfg.y0 = detail::parse_double(key, val);
        else if (key == "a") cfg.a = detail::parse_double(key, val);
        else if (key == "N") cfg.N = detail::parse_long(key, val);
        else if (key == "k_x") cfg.k_x = detail::parse_double(key, val);
        else if (key == "y_points") { cfg.y_points = detail::parse_long(key, val); cfg.y_points_set = true; }
        else if (key == "t_points") cfg.t_points = detail::parse_long(key, val);
        else if (key == "t_list") cfg.t_list = detail::parse_list(key, val);
        else if (key == "d_list") cfg.d_list = detail::parse_list(key, val);
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "format") cfg.format = val;
    }
    for (const char* req : {"L", "y0", "a", "N"})
        if (!seen.count(req))
            throw validation_error(std::string("config: missing required key '") + req + "'");

    if (!(cfg.L > 0.0)) throw validation_error("config: key 'L': must be > 0");
    if (!(cfg.hbar_over_m > 0.0))
        throw validation_error("config: key 'hbar_over_m': must be > 0");
    if (!(cfg.a > 0.0)) throw validation_error("config: key 'a': must be > 0");
    if (cfg.N < 1) throw validation_error("config: key 'N': must be >= 1");
    if (cfg.N > 100000000) throw validation_error("config: key 'N': too large");
    if (!(cfg.k_x > 0.0)) throw validation_error("config: key 'k_x': must be > 0");
    if (cfg.y_points < 2) throw validation_error("config: key 'y_points': must be >= 2");
    if (cfg.t_points < 2) throw validation_error("config: key 't_points': must be >= 2");
    if (cfg.format != "csv" && cfg.format != "pgm" && cfg.format != "both")
        throw validation_error("config: key 'format': expected csv, pgm, or both");
    try {
        require_slit_in_well(cfg.well(), cfg.slit());
    } catch (const validation_error& e) {
        throw validation_error(std::string("config: keys 'y0'/'a': ") + e.what());
    }
    for (double t : cfg.t_list)
        if (t < cfg.t_measure)
            throw validation_error("config: key 't_list': time before t_measure");
    for (double d : cfg.d_list)
        if (d < 0.0) throw validation_error("config: key 'd_list': negative distance");
    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) {
        out += k + " = " + v + "\n";
    };
    kv("L", detail::fmt17(cfg.L));
    kv("hbar_over_m", detail::fmt17(cfg.hbar_over_m));
    kv("t_measure", detail::fmt17(cfg.t_measure));
    kv("y0", detail::fmt17(cfg.y0));
    kv("a", detail::fmt17(cfg.a));
    kv("N", std::to_string(cfg.N));
    kv("k_x", detail::fmt17(cfg.k_x));
    if (cfg.y_points_set) kv("y_points", std::to_string(cfg.y_points));
    kv("t_points", std::to_string(cfg.t_points));
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += detail::fmt17(v[i]);
        }
        return s;
    };
    if (!cfg.t_list.empty()) kv("t_list", join(cfg.t_list));
    if (!cfg.d_list.empty()) kv("d_list", join(cfg.d_list));
    kv("out_dir", cfg.out_dir);
    kv("format", cfg.format);
    return out;
}

inline void write_csv_slice(const std::string& path,
                            const std::vector<double>& y_samples,
                            const std::vector<double>& density) {
    if (y_samples.size() != density.size())
        throw validation_error("write_csv_slice: length mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv_slice: cannot open " + path);
    f << "y,density\n";
    for (std::size_t j = 0; j < y_samples.size(); ++j)
        f << detail::fmt15(y_samples[j]) << ',' << detail::fmt15(density[j]) << '\n';
    if (!f) throw std::runtime_error("write_csv_slice: write failed for " + path);
}

// Reads back a two-column CSV written by write_csv_slice.
inline std::pair<std::vector<double>, std::vector<double>>
read_csv_slice(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv_slice: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || detail::trim(line) != "y,density")
        throw validation_error("read_csv_slice: bad header in " + path);
    std::vector<double> y, d;
    while (std::getline(f, line)) {
        line = detail::trim(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw validation_error("read_csv_slice: bad row in " + path);
        y.push_back(detail::parse_double("y", line.substr(0, comma)));
        d.push_back(detail::parse_double("density", line.substr(comma + 1)));
    }
    return {std::move(y), std::move(d)};
}

inline void write_pgm_carpet(const std::string& path, const DensityField& field) {
    if (field.rows() == 0 || field.cols() == 0)
        throw validation_error("write_pgm_carpet: empty field");
    double peak = 0.0;
    for (double v : field.values) peak = std::max(peak, v);
    if (!(peak > 0.0))
        throw validation_error("write_pgm_carpet: zero-valued field");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm_carpet: cannot open " + path);
    f << "P5\n# max=" << detail::fmt15(peak) << "\n"
      << field.cols() << ' ' << field.rows() << "\n65535\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(field.rows() * field.cols() * 2);
    for (std::size_t r = 0; r < field.rows(); ++r)     // row 0 is the earliest time
        for (std::size_t c = 0; c < field.cols(); ++c) {
            long long u = std::llround(field.at(r, c) / peak * 65535.0);
            if (u < 0) u = 0;
            if (u > 65535) u = 65535;
            bytes.push_back((unsigned char)((u >> 8) & 0xff));
            bytes.push_back((unsigned char)(u & 0xff));
        }
    f.write((const char*)bytes.data(), (std::streamsize)bytes.size());
    if (!f) throw std::runtime_error("write_pgm_carpet: write failed for " + path);
}

inline void write_revival_report(const std::string& path, const RevivalReport& rep) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_revival_report: cannot open " + path);
    f << "time,metric,class,copies\n";
    for (const auto& h : rep.hits)
        f << detail::fmt15(h.time) << ',' << detail::fmt15(h.metric) << ','
          << to_string(h.kind) << ',' << h.copies << '\n';
    if (!f) throw std::runtime_error("write_revival_report: write failed for " + path);
}

} // namespace qcarpet
