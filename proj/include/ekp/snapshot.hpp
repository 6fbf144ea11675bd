// CSV snapshot files shared by all solvers (format v1, stable):
//   line 1: "ekp-snapshot,1"
//   line 2: "dim,n,time,nfields"            (integer, integer, float, integer)
//   line 3: comma-separated field names
//   then grid.size() rows, one grid point per row in row-major order
//   (2D index = ix*n + iy), each row holding nfields comma-separated values.
// Floats are written in round-trip decimal form (%.17g).
#pragma once

#include <string>
#include <vector>

#include "ekp/models.hpp"

namespace ekp {

struct Snapshot {
  Grid grid;
  double time = 0.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> fields;  // fields[f][point]

  const std::vector<double>& field(const std::string& name) const;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

Snapshot snapshot_of(const ScalarField& rho, double time);
Snapshot snapshot_of(const State& state);

// round-trip decimal formatting used by snapshots and reports
std::string format_double(double v);

}  // namespace ekp
