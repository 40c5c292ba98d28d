#pragma once

// Time-series CSV and binary field snapshots.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mpfc/state.hpp"

namespace mpfc {

struct RunLogRow {
  double t = 0.0;
  double mean_phi = 0.0;
  double mean_phit = 0.0;
  double charge = 0.0;
  double energy = 0.0;
  double full_energy = 0.0;
  double hminus1_phit = 0.0;
  double h2_phi = 0.0;
  double identity_residual = 0.0;
};

struct RunLog {
  std::vector<RunLogRow> rows;
};

inline const std::vector<std::string>& timeseries_header() {
  static const std::vector<std::string> h{"t",           "mean_phi",     "mean_phit",
                                          "charge",      "energy",       "full_energy",
                                          "hminus1_phit", "h2_phi",      "identity_residual"};
  return h;
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error("csv has no column '" + name + "'");
  }
};

inline void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw Error("csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g17(row[i]);
    out << '\n';
  }
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) throw Error("csv '" + path + "' is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw Error("bad csv cell '" + cell + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void write_timeseries(const RunLog& log, const std::string& path) {
  CsvTable t;
  t.header = timeseries_header();
  for (const auto& r : log.rows) {
    t.rows.push_back({r.t, r.mean_phi, r.mean_phit, r.charge, r.energy, r.full_energy, r.hminus1_phit,
                      r.h2_phi, r.identity_residual});
  }
  write_csv(path, t);
}

// ------------------------------------------------------------------ snapshots

inline constexpr char snapshot_magic[5] = {'M', 'P', 'F', 'C', '1'};

struct Snapshot {
  int dim = 1;
  std::vector<std::int64_t> n_points;  // per axis
  double time = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  std::vector<double> phi;
  std::vector<double> phi_t;
};

namespace io_detail {

inline void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}
inline void put_i64(std::string& buf, std::int64_t v) { put_u64(buf, static_cast<std::uint64_t>(v)); }
inline void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

struct Reader {
  const std::string& data;
  std::size_t pos = 0;

  std::uint64_t u64() {
    if (pos + 8 > data.size()) throw Error("snapshot is truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace io_detail

inline Snapshot make_snapshot(const State& s, double epsilon) {
  Snapshot snap;
  const Grid& g = s.phi.grid();
  snap.dim = g.dim();
  snap.n_points.assign(static_cast<std::size_t>(g.dim()), g.n_points());
  snap.time = s.time;
  snap.beta = s.beta;
  snap.epsilon = epsilon;
  const auto p = s.phi.values();
  const auto v = s.phi_t.values();
  snap.phi.assign(p.begin(), p.end());
  snap.phi_t.assign(v.begin(), v.end());
  return snap;
}

inline std::string encode_snapshot(const Snapshot& snap) {
  std::size_t count = 1;
  for (auto n : snap.n_points) count *= static_cast<std::size_t>(n);
  if (snap.phi.size() != count || snap.phi_t.size() != count) throw Error("snapshot payload size mismatch");
  std::string buf(snapshot_magic, sizeof snapshot_magic);
  io_detail::put_i64(buf, snap.dim);
  for (auto n : snap.n_points) io_detail::put_i64(buf, n);
  io_detail::put_f64(buf, snap.time);
  io_detail::put_f64(buf, snap.beta);
  io_detail::put_f64(buf, snap.epsilon);
  for (double x : snap.phi) io_detail::put_f64(buf, x);
  for (double x : snap.phi_t) io_detail::put_f64(buf, x);
  return buf;
}

inline Snapshot decode_snapshot(const std::string& data) {
  if (data.size() < sizeof snapshot_magic || std::memcmp(data.data(), snapshot_magic, sizeof snapshot_magic) != 0) {
    throw Error("not a snapshot (bad magic)");
  }
  io_detail::Reader r{data, sizeof snapshot_magic};
  Snapshot snap;
  const auto dim = r.i64();
  if (dim < 1 || dim > 3) throw Error("snapshot has invalid dim");
  snap.dim = static_cast<int>(dim);
  std::size_t count = 1;
  for (int a = 0; a < snap.dim; ++a) {
    const auto n = r.i64();
    if (n < 1 || n > (1 << 20)) throw Error("snapshot has invalid n_points");
    snap.n_points.push_back(n);
    count *= static_cast<std::size_t>(n);
  }
  snap.time = r.f64();
  snap.beta = r.f64();
  snap.epsilon = r.f64();
  if (data.size() - r.pos != 16 * count) throw Error("snapshot payload length mismatch");
  snap.phi.resize(count);
  snap.phi_t.resize(count);
  for (auto& x : snap.phi) x = r.f64();
  for (auto& x : snap.phi_t) x = r.f64();
  return snap;
}

inline void save_snapshot(const Snapshot& snap, const std::string& path) {
  const std::string buf = encode_snapshot(snap);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_snapshot(ss.str());
}

// Rebuilds the state on a matching grid.
inline State snapshot_state(const Snapshot& snap, const GridPtr& grid) {
  if (grid->dim() != snap.dim) throw InvalidField("snapshot dim does not match grid");
  for (auto n : snap.n_points) {
    if (n != grid->n_points()) throw InvalidField("snapshot n_points does not match grid");
  }
  return make_state(Field::from_values(grid, snap.phi), Field::from_values(grid, snap.phi_t), snap.beta, snap.time);
}

}  // namespace mpfc
