#pragma once

#include <string>

#include "nlslab/vec_field.hpp"

namespace nlslab {

// Metadata written next to every field snapshot.
struct SnapshotManifest {
  double L = 0.0;
  int N = 0;
  double dt = 0.0;
  double t = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
};

// Columnar CSV (x, Re a, Im a, Re b, Im b) plus <path>.json manifest.
void write_snapshot(const std::string& csv_path, const VecField& f, const SnapshotManifest& m);

// Reads a snapshot written by write_snapshot; the manifest supplies the grid.
VecField read_snapshot(const std::string& csv_path, SnapshotManifest* manifest_out = nullptr);

}  // namespace nlslab
