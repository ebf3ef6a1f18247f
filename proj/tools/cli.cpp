#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "sgspec/error.hpp"
#include "sgspec/krein.hpp"
#include "sgspec/parallel.hpp"
#include "sgspec/pruefer.hpp"

namespace sgspec::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Accepts plain numbers and multiples of pi such as "2.5pi", "pi/2" or "0.9*pi".
double parse_number(const std::string& key, const std::string& text) {
  std::string t = lower(trim(text));
  t.erase(std::remove(t.begin(), t.end(), '*'), t.end());
  double factor = 1.0;
  const auto at = t.find("pi");
  if (at != std::string::npos) {
    std::string head = t.substr(0, at), tail = t.substr(at + 2);
    factor = pi;
    if (!tail.empty()) {
      if (tail[0] != '/') config_error("cannot read number '" + text + "' for " + key);
      factor /= parse_number(key, tail.substr(1));
    }
    if (head.empty()) return factor;
    t = head;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    config_error("cannot read number '" + text + "' for " + key);
  }
  if (used != t.size() || !std::isfinite(v)) config_error("cannot read number '" + text + "' for " + key);
  return v * factor;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  config_error("expected a boolean for " + key + ", got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) config_error("empty list for " + key);
  return out;
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) config_error(key + " must be positive");
  return v;
}

class Params {
 public:
  Params(const PotentialSpec& s) : spec_(s) {}
  double number(const std::string& k) const {
    auto it = spec_.params.find(k);
    if (it == spec_.params.end()) config_error(spec_.family + " needs parameter '" + k + "'");
    used_.push_back(k);
    return parse_number(k, it->second);
  }
  double number_or(const std::string& k, double fallback) const {
    return spec_.params.count(k) ? number(k) : fallback;
  }
  bool has(const std::string& k) const { return spec_.params.count(k) > 0; }
  std::string text(const std::string& k) const {
    auto it = spec_.params.find(k);
    if (it == spec_.params.end()) config_error(spec_.family + " needs parameter '" + k + "'");
    used_.push_back(k);
    return it->second;
  }
  void check_unused() const {
    for (const auto& [k, v] : spec_.params) {
      if (k == "reflect" || k == "translate") continue;
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        config_error("unknown parameter '" + k + "' for family " + spec_.family);
      }
    }
  }

 private:
  const PotentialSpec& spec_;
  mutable std::vector<std::string> used_;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json descriptor_json(const PotentialProfile& p) {
  json params = json::object();
  for (const auto& [k, v] : p.descriptor().params) params[k] = v;
  return {{"family", p.descriptor().family},
          {"params", params},
          {"domain", json::array({p.domain().lo, p.domain().hi})},
          {"k_minus", p.k_minus()},
          {"k_plus", p.k_plus()},
          {"matching_point", p.matching_point()}};
}

json count_json(const CountReport& c) {
  json j;
  j["I"] = c.I;
  j["I_abs"] = c.I_abs;
  j["I_error"] = c.I_error;
  j["charge"] = c.charge;
  j["lower_bound_N"] = c.lower_bound_N;
  j["exact_count"] = c.exact_count ? json(*c.exact_count) : json(nullptr);
  j["circle_angles"] = c.circle_angles;
  j["counting_region"] = c.counting_region;
  j["applicability"] = to_string(c.applicability.tag);
  j["u0"] = c.applicability.u0;
  j["theorem"] = c.theorem;
  j["near_threshold"] = c.near_threshold;
  j["scan_consistent"] = c.scan_consistent;
  return j;
}

json point_json(const SpectralPoint& p) {
  json j;
  j["z"] = complex_json(p.z);
  j["abs"] = std::abs(p.z);
  j["arg"] = std::arg(p.z);
  j["residual"] = p.residual;
  j["relative_residual"] = p.relative_residual;
  j["wdot"] = complex_json(p.wdot);
  j["wdot_method"] = p.wdot_method == DerivativeMethod::ClosedForm ? "closed_form" : "finite_difference";
  j["wdot_finite_difference"] = complex_json(p.wdot_check);
  j["on_circle"] = p.on_circle;
  j["simple"] = p.simple;
  j["from_symmetry"] = p.from_symmetry;
  if (p.signature) {
    const auto& s = *p.signature;
    j["signature"] = {{"kappa_circle", complex_json(s.kappa_circle)},
                      {"kappa_imag", complex_json(s.kappa_imag)},
                      {"circle_bracket", s.circle_bracket},
                      {"definite", s.definite}};
  } else {
    j["signature"] = nullptr;
  }
  return j;
}

json verification_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"applicable", c.applicable}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"all_passed", r.all_passed()}, {"checks", checks}};
}

json region_json(const SearchRegion& r) {
  return {{"kind", r.kind == SearchRegion::Kind::AnnulusSector ? "annulus-sector" : "rectangle"},
          {"bounds", json::array({r.r0, r.r1, r.t0, r.t1})},
          {"excluded_disks", r.excluded.size()}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string number17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

CircleScanOptions scan_options(const RunConfig& c) {
  CircleScanOptions o;
  o.grid_size = c.scan_grid;
  o.l1_tol = c.quadrature_tol;
  o.flow.tol = std::min(c.integrator_tol, 1e-12);
  return o;
}

SearchOptions search_options(const RunConfig& c) {
  SearchOptions o;
  o.tol = c.integrator_tol;
  o.threshold = c.eigenvalue_threshold;
  o.use_symmetry = c.use_symmetry;
  return o;
}

void write_prufer(const fs::path& dir, const PotentialProfile& p, const CountReport& count,
                  const RunConfig& c) {
  PrueferOptions po;
  po.tol = std::min(c.integrator_tol, 1e-12);
  const auto curve = pruefer_curve(p, 257, po);
  std::ostringstream os;
  os << "theta,endpoint\n";
  for (const auto& [th, l] : curve) os << number17(th) << ',' << number17(l) << '\n';
  write_file(dir / "prufer.csv", os.str());
  if (!c.trajectories) return;
  std::size_t k = 0;
  for (double th : count.circle_angles) {
    if (th > 0.5 * pi) continue;
    std::ostringstream t;
    t << "x,eta,log_rho\n";
    for (const auto& [x, s] : pruefer_trajectory(th, p, po)) {
      t << number17(x) << ',' << number17(s.eta) << ',' << number17(s.log_rho) << '\n';
    }
    write_file(dir / ("prufer_trajectory_" + std::to_string(k++) + ".csv"), t.str());
  }
}

void write_eigenfunctions(const fs::path& dir, const PotentialProfile& p, const SearchResult& res,
                          double tol) {
  std::size_t k = 0;
  for (const auto& pt : res.points) {
    const BoundState bs(SpectralParameter(pt.z), p, tol);
    std::ostringstream t;
    t << "x,re_phi1,im_phi1,re_phi2,im_phi2\n";
    for (double x : sample_grid(p, 2001)) {
      const auto v = bs.value(x);
      t << number17(x) << ',' << number17(v[0].real()) << ',' << number17(v[0].imag()) << ','
        << number17(v[1].real()) << ',' << number17(v[1].imag()) << '\n';
    }
    write_file(dir / ("eigenfunction_" + std::to_string(k++) + ".csv"), t.str());
  }
}

void write_scatter(const fs::path& dir, const SearchResult& res) {
  std::ostringstream os;
  os << "re,im,abs,arg,on_circle,simple,from_symmetry\n";
  for (const auto& pt : res.points) {
    os << number17(pt.z.real()) << ',' << number17(pt.z.imag()) << ',' << number17(std::abs(pt.z))
       << ',' << number17(std::arg(pt.z)) << ',' << pt.on_circle << ',' << pt.simple << ','
       << pt.from_symmetry << '\n';
  }
  write_file(dir / "scatter.csv", os.str());
}

}  // namespace

SearchRegion parse_region(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) config_error("region must look like annulus:r0,r1,t0,t1 or rect:x0,x1,y0,y1");
  const std::string kind = lower(trim(text.substr(0, colon)));
  const auto v = parse_list("region", text.substr(colon + 1));
  if (v.size() != 4) config_error("region needs four bounds");
  SearchRegion r;
  if (kind == "annulus" || kind == "annulus-sector") {
    r = SearchRegion::annulus_sector(v[0], v[1], v[2], v[3]);
  } else if (kind == "rect" || kind == "rectangle") {
    r = SearchRegion::rectangle(v[0], v[1], v[2], v[3]);
  } else {
    config_error("unknown region kind '" + kind + "'");
  }
  try {
    r.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return r;
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  RunConfig c;
  std::string line, section;
  int lineno = 0;
  bool have_family = false;
  std::map<std::string, std::string> search_keys;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') config_error(where + "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section != "potential" && section != "tolerances" && section != "search" && section != "output") {
        config_error(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(where + "expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(where + "empty key");
    if (section.empty()) config_error(where + "key outside of a section");
    try {
      if (section == "potential") {
        if (key == "family") {
          if (have_family) config_error("more than one potential family");
          c.potential.family = lower(value);
          have_family = true;
        } else {
          if (c.potential.params.count(key)) config_error("duplicate key " + key);
          std::string v = value;
          if (key == "file" && !v.empty() && fs::path(v).is_relative()) v = (fs::path(base_dir) / v).string();
          c.potential.params[key] = v;
        }
      } else if (section == "tolerances") {
        if (key == "integrator") c.integrator_tol = positive(key, parse_number(key, value));
        else if (key == "quadrature") c.quadrature_tol = positive(key, parse_number(key, value));
        else if (key == "eigenvalue") c.eigenvalue_threshold = positive(key, parse_number(key, value));
        else config_error("unknown tolerance '" + key + "'");
      } else if (section == "search") {
        if (key == "symmetry") c.use_symmetry = parse_bool(key, value);
        else if (key == "scan_grid") c.scan_grid = static_cast<std::size_t>(positive(key, parse_number(key, value)));
        else if (key == "exclusion_windings") c.exclusion_windings = parse_bool(key, value);
        else if (key == "region") c.region = parse_region(value);
        else if (key == "exclude") {
          const auto v = parse_list(key, value);
          if (v.size() != 3) config_error("exclude needs re, im, radius");
          c.region.excluded.push_back({cplx(v[0], v[1]), positive(key, v[2])});
        } else config_error("unknown search key '" + key + "'");
      } else if (section == "output") {
        if (key == "directory") c.output_dir = fs::path(value).is_relative() ? (fs::path(base_dir) / value).string() : value;
        else if (key == "spectrum_json") c.spectrum_json = parse_bool(key, value);
        else if (key == "prufer_csv") c.prufer_csv = parse_bool(key, value);
        else if (key == "trajectories") c.trajectories = parse_bool(key, value);
        else if (key == "scatter_csv") c.scatter_csv = parse_bool(key, value);
        else config_error("unknown output key '" + key + "'");
      }
    } catch (const Error& e) {
      config_error(where + e.what());
    }
  }
  if (!have_family) config_error("config has no [potential] family");
  if (c.scan_grid < 16) config_error("scan_grid must be at least 16");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path);
  const auto base = fs::path(path).parent_path();
  return parse_config(in, base.empty() ? "." : base.string());
}

PotentialProfile build_potential(const PotentialSpec& spec, const ProfileOptions& opts) {
  (void)opts;
  const Params q(spec);
  const std::string& f = spec.family;
  auto profile = [&]() -> PotentialProfile {
    if (f == "zero") return make_zero_potential();
    if (f == "buckingham_miller") return make_buckingham_miller();
    if (f == "monotone_kink") {
      const std::string shape = q.has("shape") ? lower(q.text("shape")) : "atan_exp";
      KinkShape k;
      if (shape == "atan_exp") k = KinkShape::AtanExp;
      else if (shape == "tanh_ramp") k = KinkShape::TanhRamp;
      else config_error("unknown kink shape '" + shape + "'");
      return make_monotone_kink(k, q.number("scale"));
    }
    if (f == "sech_breather") return make_klaus_shaw_breather(q.number("peak"), q.number("width"));
    if (f == "breather_l1") return make_breather_with_l1(q.number("peak"), q.number("l1"));
    if (f == "compact_bump") return make_compact_bump(q.number("peak"), q.number("half_width"));
    if (f == "smoothed_box") return make_smoothed_box(q.number("height"), q.number("half_width"), q.number("ramp"));
    if (f == "odd_sech") return make_odd_sech(q.number_or("amplitude", pi));
    if (f == "piecewise_constant") {
      return make_piecewise_constant(parse_list("breaks", q.text("breaks")), parse_list("values", q.text("values")));
    }
    if (f == "tabulated") return load_tabulated(q.text("file"));
    config_error("unknown potential family '" + f + "'");
  };
  PotentialProfile p = [&] {
    try {
      return profile();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) config_error(e.what());
      throw;
    }
  }();
  q.check_unused();
  auto it = spec.params.find("reflect");
  if (it != spec.params.end() && parse_bool("reflect", it->second)) p = p.reflected();
  it = spec.params.find("translate");
  if (it != spec.params.end()) {
    const double a = parse_number("translate", it->second);
    if (a != 0.0) p = p.translated(a);
  }
  return p;
}

int run(Verb verb, const RunConfig& config, std::ostream& log) {
  const PotentialProfile p = build_potential(config.potential);
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  const auto count = count_report(p, scan_options(config));
  json doc;
  doc["potential"] = descriptor_json(p);
  doc["count"] = count_json(count);
  write_file(dir / "count.json", count_json(count).dump(2) + "\n");
  log << "I = " << number17(count.I) << ", charge " << count.charge << ", "
      << to_string(count.applicability.tag) << ", " << count.circle_angles.size()
      << " circle eigenangle(s)\n";

  if (verb == Verb::Count) return 0;
  if (verb == Verb::Prufer) {
    write_prufer(dir, p, count, config);
    log << "wrote " << (dir / "prufer.csv").string() << "\n";
    return 0;
  }

  const auto so = search_options(config);
  const auto res = locate_eigenvalues(config.region, p, so);
  VerifyOptions vo;
  vo.region = config.region;
  vo.search = so;
  vo.scan = scan_options(config);
  vo.exclusion_windings = verb == Verb::Verify && config.exclusion_windings;
  const auto report = verify_spectrum(res, p, count, vo);

  json points = json::array();
  for (const auto& pt : res.points) points.push_back(point_json(pt));
  doc["search"] = {{"region", region_json(config.region)},
                   {"searched", res.searched},
                   {"total_winding", res.total_winding},
                   {"scale", res.scale},
                   {"threshold", res.threshold},
                   {"evaluations", res.evaluations},
                   {"cells", res.cells},
                   {"max_depth", res.max_depth_reached},
                   {"anomalies", res.anomalies}};
  doc["tolerances"] = {{"integrator", config.integrator_tol},
                       {"quadrature", config.quadrature_tol},
                       {"eigenvalue", config.eigenvalue_threshold}};
  doc["points"] = points;
  doc["verification"] = verification_json(report);
  if (config.spectrum_json) write_file(dir / "spectrum.json", doc.dump(2) + "\n");
  if (config.scatter_csv) write_scatter(dir, res);
  if (config.prufer_csv) write_prufer(dir, p, count, config);
  if (config.trajectories) write_eigenfunctions(dir, p, res, config.integrator_tol);

  log << res.points.size() << " eigenvalue(s) located\n";
  for (const auto& pt : res.points) {
    log << "  z = " << number17(pt.z.real()) << (pt.z.imag() < 0 ? " - " : " + ")
        << number17(std::abs(pt.z.imag())) << "i  |W|/scale = " << pt.relative_residual
        << (pt.on_circle ? "  on circle" : "") << "\n";
  }
  for (const auto& c : report.checks) {
    if (!c.applicable) continue;
    log << (c.passed ? "  pass  " : "  FAIL  ") << c.name << ": " << c.detail << "\n";
  }
  return report.all_passed() ? 0 : 2;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  auto diagnose = [&](std::string_view code, const std::string& msg) {
    err << json{{"error", code}, {"message", msg}}.dump() << "\n";
  };
  CLI::App app{"Discrete spectrum of the sine-Gordon scattering problem"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, region;
  double tol = 0.0;
  std::map<std::string, Verb> verbs{{"spectrum", Verb::Spectrum}, {"count", Verb::Count},
                                    {"prufer", Verb::Prufer}, {"verify", Verb::Verify}};
  const std::map<std::string, std::string> help{
      {"spectrum", "locate eigenvalues and write spectrum.json"},
      {"count", "counting theorems and circle scan, count.json"},
      {"prufer", "endpoint angle curve, prufer.csv"},
      {"verify", "full search plus exclusion-region windings"}};
  for (const auto& [name, verb] : verbs) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("config", config_path, "run configuration")->required();
    sub->add_option("--tol", tol, "integrator tolerance");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--region", region, "annulus:r0,r1,t0,t1 or rect:x0,x1,y0,y1");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    diagnose("ConfigError", e.what());
    return 1;
  }
  Verb verb = Verb::Spectrum;
  for (const auto& [name, v] : verbs) {
    if (app.got_subcommand(name)) verb = v;
  }
  try {
    RunConfig config = load_config(config_path);
    if (tol != 0.0) config.integrator_tol = positive("--tol", tol);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!region.empty()) {
      auto r = parse_region(region);
      r.excluded = config.region.excluded;
      config.region = r;
    }
    return run(verb, config, out);
  } catch (const Error& e) {
    diagnose(to_string(e.code()), e.what());
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError ? 1 : 2;
  } catch (const std::exception& e) {
    diagnose("InternalError", e.what());
    return 2;
  }
}

}  // namespace sgspec::cli
