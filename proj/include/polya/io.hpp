#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "polya/config.hpp"
#include "polya/dynamics.hpp"

namespace polya {

inline constexpr std::string_view kTrajectoryHeader = "t,agent,beta,mu";

namespace detail {

// Shortest representation that reads back to the same double.
inline void append_number(std::string& out, double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, end);
}

inline void append_number(std::string& out, std::uint64_t x) {
    char buf[24];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, end);
}

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* column) {
    T value{};
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size()) {
        throw ConfigError("trajectory", "line " + std::to_string(line) + ": bad " + column + " '" +
                                            std::string(field) + "'");
    }
    return value;
}

}  // namespace detail

/// One row per (record, agent); agents are 1-based.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    std::string buf;
    buf.append(kTrajectoryHeader).push_back('\n');
    for (const TrajectoryRecord& r : traj.records) {
        for (Eigen::Index i = 0; i < r.beta.size(); ++i) {
            detail::append_number(buf, r.t);
            buf.push_back(',');
            detail::append_number(buf, static_cast<std::uint64_t>(i + 1));
            buf.push_back(',');
            detail::append_number(buf, r.beta[i]);
            buf.push_back(',');
            detail::append_number(buf, r.mu[i]);
            buf.push_back('\n');
        }
        if (buf.size() > (1u << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot write " + path.string());
    write_trajectory_csv(out, traj);
}

/// Reads the format written above. Rows of one record must be contiguous with
/// agents 1..n in order; every record has the same n. Throws ConfigError.
inline Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trajectory", "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader) {
        throw ConfigError("trajectory", "expected header '" + std::string(kTrajectoryHeader) + "'");
    }

    Trajectory traj;
    std::vector<double> beta;
    std::vector<double> mu;
    std::uint64_t current_t = 0;
    std::size_t n = 0;
    std::size_t lineno = 1;
    const auto flush = [&] {
        if (beta.empty()) return;
        if (n == 0) n = beta.size();
        if (beta.size() != n) {
            throw ConfigError("trajectory", "record t=" + std::to_string(current_t) + " has " +
                                                std::to_string(beta.size()) + " agents, expected " +
                                                std::to_string(n));
        }
        traj.records.push_back({current_t, Eigen::Map<Vector>(beta.data(), static_cast<Eigen::Index>(n)),
                                Eigen::Map<Vector>(mu.data(), static_cast<Eigen::Index>(n))});
        beta.clear();
        mu.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view rest(line);
        std::string_view cols[4];
        for (int c = 0; c < 4; ++c) {
            const auto comma = rest.find(',');
            if ((c < 3) != (comma != std::string_view::npos)) {
                throw ConfigError("trajectory", "line " + std::to_string(lineno) + ": expected 4 columns");
            }
            cols[c] = rest.substr(0, comma);
            rest = c < 3 ? rest.substr(comma + 1) : std::string_view{};
        }
        const auto t = detail::parse_number<std::uint64_t>(cols[0], lineno, "t");
        const auto agent = detail::parse_number<std::uint64_t>(cols[1], lineno, "agent");
        const auto b = detail::parse_number<double>(cols[2], lineno, "beta");
        const auto m = detail::parse_number<double>(cols[3], lineno, "mu");
        if (!(b >= 0.0 && b <= 1.0) || !(m >= 0.0 && m <= 1.0)) {
            throw ConfigError("trajectory", "line " + std::to_string(lineno) + ": beta and mu must lie in [0, 1]");
        }

        if (agent == 1) {
            flush();
            if (!traj.records.empty() && t <= traj.records.back().t) {
                throw ConfigError("trajectory", "line " + std::to_string(lineno) + ": t must increase");
            }
            current_t = t;
        } else if (t != current_t || agent != beta.size() + 1) {
            throw ConfigError("trajectory", "line " + std::to_string(lineno) + ": rows out of order");
        }
        beta.push_back(b);
        mu.push_back(m);
    }
    flush();
    if (traj.records.empty()) throw ConfigError("trajectory", "no data rows");
    const auto& last = traj.records.back();
    traj.final_state.t = last.t;
    traj.final_state.beta = last.beta;
    traj.final_state.mu = last.mu;
    return traj;
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("trajectory", "cannot open " + path.string());
    return read_trajectory_csv(in);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace polya
