#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sgspec/potentials.hpp"
#include "sgspec/spectrum.hpp"

namespace sgspec::cli {

struct PotentialSpec {
  std::string family;
  std::map<std::string, std::string> params;
};

struct RunConfig {
  PotentialSpec potential;
  double integrator_tol = 1e-11;
  double quadrature_tol = 1e-10;
  double eigenvalue_threshold = 1e-8;
  SearchRegion region;
  bool use_symmetry = true;
  std::size_t scan_grid = 256;
  bool exclusion_windings = true;
  std::string output_dir = "sgspec_out";
  bool spectrum_json = true;
  bool prufer_csv = false;
  bool trajectories = false;
  bool scatter_csv = true;
};

enum class Verb { Spectrum, Count, Prufer, Verify };

// Sections [potential], [tolerances], [search], [output]; key = value lines,
// '#' starts a comment. Relative file paths resolve against base_dir. Throws
// Error(ConfigError) with the offending line.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// "annulus:r0,r1,t0,t1" or "rect:re0,re1,im0,im1".
SearchRegion parse_region(const std::string& text);

PotentialProfile build_potential(const PotentialSpec& spec, const ProfileOptions& opts = {});

// Runs one verb and writes its artifacts; returns the process exit code
// (0 ok, 1 configuration error, 2 verification failure). Progress goes to log.
int run(Verb verb, const RunConfig& config, std::ostream& log);

// Argument parsing plus run(); every error becomes a JSON diagnostic on err.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sgspec::cli
