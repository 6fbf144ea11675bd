#include "ekp/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ekp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<double>& Snapshot::field(const std::string& name) const {
  for (std::size_t f = 0; f < names.size(); ++f)
    if (names[f] == name) return fields[f];
  throw std::out_of_range("Snapshot: no field named " + name);
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  if (snap.names.size() != snap.fields.size())
    throw std::invalid_argument("write_snapshot: name/field count mismatch");
  for (const auto& f : snap.fields)
    if (f.size() != snap.grid.size()) throw std::invalid_argument("write_snapshot: field size mismatch");

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out << "ekp-snapshot,1\n";
  out << snap.grid.dim << ',' << snap.grid.n << ',' << format_double(snap.time) << ','
      << snap.names.size() << '\n';
  for (std::size_t f = 0; f < snap.names.size(); ++f)
    out << snap.names[f] << (f + 1 < snap.names.size() ? ',' : '\n');
  for (std::size_t i = 0; i < snap.grid.size(); ++i) {
    for (std::size_t f = 0; f < snap.fields.size(); ++f)
      out << format_double(snap.fields[f][i]) << (f + 1 < snap.fields.size() ? ',' : '\n');
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path);
}

namespace {
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}
}  // namespace

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"ekp-snapshot", "1"})
    throw std::runtime_error("read_snapshot: bad magic in " + path);

  if (!std::getline(in, line)) throw std::runtime_error("read_snapshot: truncated header");
  const auto hdr = split_csv(line);
  if (hdr.size() != 4) throw std::runtime_error("read_snapshot: malformed header");
  Snapshot snap;
  snap.grid = Grid::make(std::stoi(hdr[0]), std::stoi(hdr[1]));
  snap.time = std::stod(hdr[2]);
  const std::size_t nfields = std::stoul(hdr[3]);

  if (!std::getline(in, line)) throw std::runtime_error("read_snapshot: missing field names");
  snap.names = split_csv(line);
  if (snap.names.size() != nfields) throw std::runtime_error("read_snapshot: field name count mismatch");
  snap.fields.assign(nfields, std::vector<double>(snap.grid.size()));

  for (std::size_t i = 0; i < snap.grid.size(); ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("read_snapshot: truncated data");
    const auto row = split_csv(line);
    if (row.size() != nfields) throw std::runtime_error("read_snapshot: malformed data row");
    for (std::size_t f = 0; f < nfields; ++f) snap.fields[f][i] = std::stod(row[f]);
  }
  return snap;
}

Snapshot snapshot_of(const ScalarField& rho, double time) {
  Snapshot snap;
  snap.grid = rho.grid;
  snap.time = time;
  snap.names = {"rho"};
  snap.fields = {rho.values};
  return snap;
}

Snapshot snapshot_of(const State& state) {
  Snapshot snap;
  snap.grid = state.rho.grid;
  snap.time = state.time;
  snap.names = {"rho", "m_x"};
  snap.fields = {state.rho.values, state.momentum.comp[0]};
  if (snap.grid.dim == 2) {
    snap.names.push_back("m_y");
    snap.fields.push_back(state.momentum.comp[1]);
  }
  return snap;
}

}  // namespace ekp
