#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "quatsync/errors.hpp"
#include "quatsync/integrate.hpp"

namespace quatsync {

/// Locale-independent decimal formatting with 17 significant digits
/// (round-trip safe), so emitted files are byte-stable across runs.
inline std::string fmt17(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Writes through a temp file in the target directory, then renames into
/// place, so readers never observe a half-written file.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Full-model trajectory CSV: t, then per-oscillator w{n},x{n},y{n},z{n}
/// columns (1-based oscillator index).
inline std::string trajectory_csv(const Trajectory& traj, std::size_t n_osc) {
  std::string out = "t";
  for (std::size_t i = 1; i <= n_osc; ++i) {
    const std::string k = std::to_string(i);
    out += ",w" + k + ",x" + k + ",y" + k + ",z" + k;
  }
  out += "\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out += fmt17(traj.times[s]);
    const std::vector<double>& y = traj.states[s];
    for (std::size_t i = 0; i < n_osc; ++i) {
      out += "," + fmt17(y[i]);
      out += "," + fmt17(y[n_osc + i]);
      out += "," + fmt17(y[2 * n_osc + i]);
      out += "," + fmt17(y[3 * n_osc + i]);
    }
    out += "\n";
  }
  return out;
}

/// Planar trajectory CSV with columns t, w, v.
inline std::string planar_csv(const Trajectory& traj) {
  std::string out = "t,w,v\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out += fmt17(traj.times[s]) + "," + fmt17(traj.states[s][0]) + "," +
           fmt17(traj.states[s][1]) + "\n";
  }
  return out;
}

}  // namespace quatsync
