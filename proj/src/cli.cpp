#include "numidx/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "numidx/descriptor_text.hpp"
#include "numidx/matrix_io.hpp"

namespace numidx {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t env_seed() {
  const char* s = std::getenv("NUMIDX_SEED");
  if (!s || !*s) return kDefaultSeed;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 0);
    if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("NUMIDX_SEED", std::string("not an unsigned integer: '") + s + "'");
  }
}

int env_threads() {
  const char* s = std::getenv("NUMIDX_THREADS");
  if (!s || !*s) return 1;
  try {
    const int v = std::stoi(s);
    if (v < 1) throw std::invalid_argument("must be >= 1");
    return v;
  } catch (const std::exception&) {
    throw ParseError("NUMIDX_THREADS", std::string("not a positive integer: '") + s + "'");
  }
}

Field parse_field(const std::string& text) {
  if (text == "real") return Field::real;
  if (text == "complex") return Field::complex;
  throw ParseError("field", "expected real or complex, got '" + text + "'");
}

double parse_number(const std::string& text, const std::string& field) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("bad number");
    return v;
  } catch (const std::exception&) {
    throw ParseError(field, "not a number: '" + text + "'");
  }
}

Exponent to_exponent(double p, const std::string& field) {
  if (std::isinf(p)) return Exponent::infinity();
  if (!(p >= 1.0)) throw ParseError(field, "exponent must lie in [1, inf]");
  return Exponent::of(p);
}

std::string num(double v) { return format_double(v); }

json scalar_json(Scalar z, Field field) {
  if (field == Field::complex) return json::array({z.real(), z.imag()});
  return z.real();
}

json coords_json(std::span<const Scalar> c, Field field) {
  json a = json::array();
  for (const Scalar& z : c) a.push_back(scalar_json(z, field));
  return a;
}

std::string coords_text(std::span<const Scalar> c, Field field) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ", ";
    s += field == Field::complex ? "(" + num(c[i].real()) + (c[i].imag() < 0 ? "" : "+") + num(c[i].imag()) + "i)"
                                 : num(c[i].real());
  }
  return s + "]";
}

ordered tagged(double value, const std::string& method, const std::string& guarantee) {
  ordered o;
  o["value"] = value;
  o["method"] = method;
  o["guarantee"] = guarantee;
  return o;
}

ordered radius_json(const RadiusEstimate& e, const std::string& quantity) {
  const Field f = e.witness.x.space().field();
  ordered o;
  o["quantity"] = quantity;
  o["radius"] = tagged(e.value, to_string(e.method), to_string(e.guarantee));
  o["witness"]["x"] = coords_json(e.witness.x.coords(), f);
  o["witness"]["xstar"] = coords_json(e.witness.xstar.coords(), f);
  o["witness"]["slack"] = e.witness.slack;
  o["work"] = e.work;
  return o;
}

ordered bounds_json(const TheoreticalBounds& b) {
  ordered o;
  o["lower"] = tagged(b.lower, "theory", b.lower_source);
  o["upper"] = tagged(b.upper, "theory", b.upper_source);
  if (!b.note.empty()) o["note"] = b.note;
  return o;
}

ordered index_json(const IndexEstimate& e) {
  ordered o;
  o["kind"] = to_string(e.kind);
  o["field"] = to_string(e.field);
  if (e.kind == IndexKind::rank) o["rank"] = e.rank;
  if (e.kind == IndexKind::polynomial) o["degree"] = e.degree;
  o["upper_bound"] = tagged(e.upper_bound, std::string("min-max/") + to_string(e.radius_method), "upper-bound (best found)");
  o["witness_radius"] = tagged(e.witness_radius.value, to_string(e.witness_radius.method),
                               to_string(e.witness_radius.guarantee));
  o["witness_norm"] = tagged(e.witness_norm.value, to_string(e.witness_norm.method), "certified-lower-bound");
  if (e.target) o["target"] = tagged(*e.target, "closed-form", "1/(p^(1/p) q^(1/q))");
  o["bounds"] = bounds_json(e.bounds);
  o["evaluations"] = e.evaluations;
  if (const auto* t = std::get_if<Operator>(&e.witness))
    o["witness"] = json::parse(write_operator_json(*t));
  else
    o["witness"] = json::parse(write_polynomial_json(std::get<HomogeneousPolynomial>(e.witness)));
  return o;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("out", "cannot write '" + path + "'");
  f << text;
}

void write_manifest(const std::string& path, const std::string& command, const ordered& config,
                    const std::string& started, const ordered& counters, const ordered& summary,
                    const std::vector<std::string>& files) {
  ordered m;
  m["artifact_version"] = kArtifactVersion;
  m["command"] = command;
  m["config"] = config;
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  m["counters"] = counters;
  m["summary"] = summary;
  m["files"] = files;
  write_file(path, m.dump(2) + "\n");
}

std::vector<std::size_t> to_dims(const std::vector<double>& values, const std::string& field) {
  std::vector<std::size_t> dims;
  for (double v : values) {
    if (!(v >= 1.0) || v != std::floor(v) || std::isinf(v)) throw ParseError(field, "dimensions must be integers >= 1");
    dims.push_back(static_cast<std::size_t>(v));
  }
  return dims;
}

std::vector<std::size_t> parse_blocks(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_number(item, "blocks");
    if (v < 0 || v != std::floor(v)) throw ParseError("blocks", "block indices are integers >= 0");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ParseError("blocks", "empty block list");
  return out;
}

std::vector<SpaceDescriptor> parse_summands(const std::string& text, Field field) {
  std::vector<SpaceDescriptor> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_descriptor(item).with_field(field));
  if (out.empty()) throw ParseError("summands", "empty summand list");
  return out;
}

std::string file_label(const SuiteReport& r) {
  std::string s = r.suite + (r.label.empty() ? "" : "-" + r.label);
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.' && ch != '_') ch = '_';
  return s;
}

struct Common {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
};

// ---- radius ---------------------------------------------------------------

struct RadiusArgs {
  std::string space, matrix, field, method = "auto", out;
  int resolution = 2000, restarts = 64;
  bool absolute = false;
};

int cmd_radius(const RadiusArgs& a, const Common& c, std::ostream& out) {
  const std::string started = utc_now();
  OperatorOverrides ov;
  if (!a.space.empty()) ov.space = parse_descriptor(a.space);
  if (!a.field.empty()) ov.field = parse_field(a.field);
  RadiusOptions ro;
  ro.method = parse_radius_method(a.method);
  ro.resolution = a.resolution;
  if (a.restarts < 1) throw ParseError("restarts", "must be >= 1");
  ro.ascent.restarts = a.restarts;

  const std::string text = read_text_file(a.matrix);
  RadiusEstimate e;
  std::string quantity = "numerical-radius";
  SpaceDescriptor space = SpaceDescriptor::scalar();
  if (is_polynomial_json(text)) {
    if (a.absolute) throw ParseError("absolute", "not available for polynomial input");
    const HomogeneousPolynomial p = read_polynomial_json(text, ov);
    space = p.space();
    quantity = "polynomial-numerical-radius";
    e = poly_radius(p, ro, c.seed);
  } else {
    const Operator t = read_operator_json(text, ov);
    space = t.space();
    if (a.absolute) {
      quantity = "absolute-numerical-radius";
      e = absolute_radius(t, ro, c.seed);
    } else {
      e = numerical_radius(t, ro, c.seed);
    }
  }
  out << "quantity " << quantity << "\n";
  out << "value " << num(e.value) << "\n";
  out << "method " << to_string(e.method) << "\n";
  out << "guarantee " << to_string(e.guarantee) << "\n";
  out << "witness.x " << coords_text(e.witness.x.coords(), space.field()) << "\n";
  out << "witness.xstar " << coords_text(e.witness.xstar.coords(), space.field()) << "\n";
  out << "witness.slack " << num(e.witness.slack) << "\n";

  if (!a.out.empty()) {
    ordered r = radius_json(e, quantity);
    r["descriptor"] = serialize_descriptor(space);
    r["seed"] = c.seed;
    write_file(a.out, r.dump(2) + "\n");
    ordered config{{"space", a.space}, {"matrix", a.matrix}, {"field", a.field}, {"method", a.method},
                   {"resolution", a.resolution}, {"restarts", a.restarts}, {"absolute", a.absolute}, {"seed", c.seed}};
    write_manifest(a.out + ".manifest.json", "radius", config, started, ordered{{"objective_evaluations", e.work}},
                   ordered{{"value", e.value}}, {a.out});
  }
  return kExitOk;
}

// ---- index ----------------------------------------------------------------

struct IndexArgs {
  std::string space, field, out;
  int budget = 100, restarts = 8, rank = 0, poly_k = 0;
  bool absolute = false;
};

int cmd_index(const IndexArgs& a, const Common& c, std::ostream& out) {
  const std::string started = utc_now();
  SpaceDescriptor space = parse_descriptor(a.space);
  if (!a.field.empty()) space = space.with_field(parse_field(a.field));
  if ((a.rank > 0) + (a.poly_k > 0) + a.absolute > 1)
    throw ParseError("index", "--rank, --absolute and --poly-k are mutually exclusive");
  if (a.budget < 1) throw ParseError("budget", "must be >= 1");
  if (a.restarts < 1) throw ParseError("restarts", "must be >= 1");
  IndexOptions io;
  io.budget = a.budget;
  io.radius.ascent.restarts = a.restarts;

  IndexEstimate e = a.rank > 0     ? rank_r_index_estimate(space, static_cast<std::size_t>(a.rank), io, c.seed)
                    : a.absolute   ? absolute_index_estimate(space, io, c.seed)
                    : a.poly_k > 0 ? poly_index_estimate(space, a.poly_k, io, c.seed)
                                   : numerical_index_estimate(space, io, c.seed);

  out << "kind " << to_string(e.kind) << "\n";
  out << "descriptor " << serialize_descriptor(space) << "\n";
  out << "upper_bound " << num(e.upper_bound) << " (best found; min-max/" << to_string(e.radius_method) << ")\n";
  out << "witness_radius " << num(e.witness_radius.value) << " " << to_string(e.witness_radius.method) << " "
      << to_string(e.witness_radius.guarantee) << "\n";
  out << "witness_norm " << num(e.witness_norm.value) << " " << to_string(e.witness_norm.method) << "\n";
  out << "bounds [" << num(e.bounds.lower) << ", " << num(e.bounds.upper) << "] lower: " << e.bounds.lower_source
      << "; upper: " << e.bounds.upper_source << "\n";
  if (!e.bounds.note.empty()) out << "note " << e.bounds.note << "\n";
  if (e.target) out << "target " << num(*e.target) << "\n";
  out << "evaluations " << e.evaluations << "\n";

  if (!a.out.empty()) {
    ordered r = index_json(e);
    r["descriptor"] = serialize_descriptor(space);
    r["seed"] = c.seed;
    write_file(a.out, r.dump(2) + "\n");
    ordered config{{"space", a.space}, {"field", a.field}, {"budget", a.budget}, {"restarts", a.restarts},
                   {"rank", a.rank}, {"poly_k", a.poly_k}, {"absolute", a.absolute}, {"seed", c.seed}};
    write_manifest(a.out + ".manifest.json", "index", config, started, ordered{{"candidate_evaluations", e.evaluations}},
                   ordered{{"upper_bound", e.upper_bound}}, {a.out});
  }
  return kExitOk;
}

// ---- mp -------------------------------------------------------------------

struct MpArgs {
  std::string p, curve;
  int points = 1000;
};

int cmd_mp(const MpArgs& a, std::ostream& out) {
  const double p = parse_number(a.p, "p");
  if (std::isinf(p) || !(p >= 1.0)) throw ParseError("p", "M_p needs a finite p >= 1");
  const MpResult r = mp_constant(p);
  out << "p " << num(r.p) << "\n";
  out << "M_p " << num(r.value) << "\n";
  out << "argmax_t " << num(r.argmax_t) << "\n";
  if (!a.curve.empty()) {
    if (a.points < 1) throw ParseError("points", "must be >= 1");
    std::string csv = "row,t,value\n";
    for (int k = 0; k <= a.points; ++k) {
      const double t = static_cast<double>(k) / a.points;
      csv += "curve," + num(t) + "," + num(std::abs(std::pow(t, p - 1.0) - t) / (1.0 + std::pow(t, p))) + "\n";
    }
    csv += "max," + num(r.argmax_t) + "," + num(r.value) + "\n";
    write_file(a.curve, csv);
  }
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string family, p, m, field, out;
  int budget = 100, restarts = 8;
};

int cmd_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
  const Field field = a.field.empty() ? Field::real : parse_field(a.field);
  ExperimentOptions eo;
  eo.threads = c.threads;
  if (a.budget < 1) throw ParseError("budget", "must be >= 1");
  eo.index.budget = a.budget;
  eo.index.radius.ascent.restarts = a.restarts;

  std::string csv;
  bool violated = false;
  if (a.family == "lpm") {
    const auto ps = parse_range(a.p, "p");
    if (ps.size() != 1) throw ParseError("p", "family lpm takes a single exponent");
    const Exponent p = to_exponent(ps[0], "p");
    const auto dims = to_dims(parse_range(a.m.empty() ? "1..4" : a.m, "m"), "m");
    const auto points = index_sweep(p, dims, field, eo, c.seed);
    csv = "family,p,m,index_upper_bound,radius_method,guarantee,bound_lower,bound_upper,increase\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const IndexEstimate& e = points[i].estimate;
      const double inc = i == 0 ? 0.0 : std::max(0.0, e.upper_bound - points[i - 1].estimate.upper_bound);
      if (i > 0 && points[i].m > points[i - 1].m && inc > 0.02) violated = true;
      csv += "lpm," + (p.is_infinite() ? std::string("inf") : num(p.value())) + "," + std::to_string(points[i].m) + "," +
             num(e.upper_bound) + ",min-max/" + to_string(e.radius_method) + ",upper-bound," + num(e.bounds.lower) + "," +
             num(e.bounds.upper) + "," + num(inc) + "\n";
    }
  } else if (a.family == "lp2-curve") {
    const auto ps = parse_range(a.p.empty() ? "1..6:0.5" : a.p, "p");
    const auto dims = to_dims(parse_range(a.m.empty() ? "2" : a.m, "m"), "m");
    if (dims.size() != 1) throw ParseError("m", "family lp2-curve takes a single dimension");
    for (double p : ps)
      if (std::isinf(p) || p < 1.0) throw ParseError("p", "family lp2-curve needs finite p >= 1");
    std::vector<double> none;
    const SuiteReport r = bounds_check(ps, dims, none, eo, c.seed);
    csv = "family,p,m,index_upper_bound,radius_method,guarantee,M_p,M_p_half,lower_bound_violation\n";
    std::size_t k = 0;
    for (const auto& rec : r.records) {
      if (rec.check != "lower-bound") continue;
      const double p = ps[k++];
      csv += "lp2-curve," + num(p) + "," + std::to_string(dims[0]) + "," + num(rec.values[0].value) + "," +
             rec.values[0].method + ",upper-bound," + num(rec.values[1].value) + "," + num(rec.values[2].value) + "," +
             num(rec.violation) + "\n";
    }
    violated = !r.pass();
  } else {
    throw ParseError("family", "expected lpm or lp2-curve, got '" + a.family + "'");
  }
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
    out << "wrote " << a.out << "\n";
  }
  return violated ? kExitViolation : kExitOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all", space, field, blocks, mode = "linf", summands, p, m, out_dir;
  int cases = 50, budget = 100, restarts = 64, level = 2, depth = 1;
};

int cmd_verify(const VerifyArgs& a, const Common& c, std::ostream& out) {
  const std::string started = utc_now();
  ExperimentOptions eo;
  eo.threads = c.threads;
  if (a.budget < 1) throw ParseError("budget", "must be >= 1");
  if (a.cases < 1) throw ParseError("cases", "must be >= 1");
  eo.index.budget = a.budget;
  eo.radius.ascent.restarts = a.restarts;
  const auto& names = default_suite_names();
  if (std::find(names.begin(), names.end(), a.suite) == names.end())
    throw ParseError("suite", "unknown suite '" + a.suite + "' (expected lcc|gcc|sums|duality|bounds|all)");
  const bool custom = !a.space.empty() || !a.summands.empty() || !a.p.empty();
  if (custom && a.suite == "all") throw ParseError("space", "custom inputs need a single suite, not 'all'");
  const Field field = a.field.empty() ? Field::real : parse_field(a.field);

  std::vector<SuiteReport> reports;
  if (!custom) {
    reports = run_default_suite(a.suite, eo, c.seed);
  } else if (a.suite == "duality") {
    reports.push_back(duality_check(parse_descriptor(a.space).with_field(field), a.cases, eo, c.seed));
  } else if (a.suite == "lcc") {
    if (a.level < 1 || a.depth < 1) throw ParseError("m", "level and depth must be >= 1");
    reports.push_back(lcc_check(parse_descriptor(a.space).with_field(field), static_cast<std::size_t>(a.level),
                                static_cast<std::size_t>(a.depth), a.cases, eo, c.seed));
  } else if (a.suite == "gcc") {
    reports.push_back(gcc_check(parse_descriptor(a.space).with_field(field), parse_blocks(a.blocks.empty() ? "0" : a.blocks),
                                a.cases, eo, c.seed));
  } else if (a.suite == "sums") {
    if (a.summands.empty()) throw ParseError("summands", "suite sums needs --summands");
    reports.push_back(sum_index_check(parse_summands(a.summands, field), parse_sum_mode(a.mode), eo, c.seed));
  } else {
    const auto ps = parse_range(a.p.empty() ? "1.5,3" : a.p, "p");
    const auto dims = to_dims(parse_range(a.m.empty() ? "2" : a.m, "m"), "m");
    reports.push_back(bounds_check(ps, dims, {}, eo, c.seed));
  }

  if (!a.out_dir.empty()) std::filesystem::create_directories(a.out_dir);
  bool all_pass = true;
  std::vector<std::string> files;
  ordered summary = ordered::array();
  long records = 0;
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass();
    records += static_cast<long>(r.records.size());
    out << (r.pass() ? "PASS " : "FAIL ") << r.suite << " " << r.label << " max_violation=" << num(r.max_violation());
    for (const auto& ch : r.checks)
      out << " [" << ch.name << (ch.hard ? "" : " (soft)") << " " << num(ch.max_violation) << " <= " << num(ch.tolerance)
          << (ch.pass ? " ok" : " VIOLATED") << "]";
    out << "\n";
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
    if (!a.out_dir.empty()) {
      const std::string name = file_label(r) + ".json";
      write_file((std::filesystem::path(a.out_dir) / name).string(), suite_report_json(r));
      files.push_back(name);
    }
    summary.push_back(ordered{{"suite", r.suite}, {"label", r.label}, {"pass", r.pass()}, {"max_violation", r.max_violation()}});
  }
  out << "verdict " << (all_pass ? "PASS" : "FAIL") << "\n";
  if (!a.out_dir.empty()) {
    ordered config{{"suite", a.suite}, {"space", a.space}, {"field", a.field}, {"cases", a.cases},
                   {"budget", a.budget}, {"restarts", a.restarts}, {"seed", c.seed}, {"threads", c.threads}};
    write_manifest((std::filesystem::path(a.out_dir) / "manifest.json").string(), "verify", config, started,
                   ordered{{"reports", reports.size()}, {"records", records}}, summary, files);
  }
  return all_pass ? kExitOk : kExitViolation;
}

}  // namespace

std::vector<double> parse_range(const std::string& text, const std::string& field) {
  if (text.empty()) throw ParseError(field, "empty range");
  std::vector<double> out;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, field));
    return out;
  }
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_number(text, field)};
  const std::string rest = text.substr(dots + 2);
  const auto colon = rest.find(':');
  const double lo = parse_number(text.substr(0, dots), field);
  const double hi = parse_number(rest.substr(0, colon), field);
  const double step = colon == std::string::npos ? 1.0 : parse_number(rest.substr(colon + 1), field);
  if (!(step > 0.0) || std::isinf(lo) || std::isinf(hi) || std::isinf(step))
    throw ParseError(field, "range step must be a positive finite number");
  if (hi < lo) throw ParseError(field, "empty range '" + text + "'");
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw ParseError(field, "range too long");
  for (long k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

std::string suite_report_json(const SuiteReport& r) {
  ordered o;
  o["suite"] = r.suite;
  o["label"] = r.label;
  o["descriptors"] = r.descriptors;
  o["cases"] = r.cases;
  o["seed"] = r.seed;
  o["pass"] = r.pass();
  o["max_violation"] = r.max_violation();
  ordered checks = ordered::array();
  for (const auto& c : r.checks)
    checks.push_back(ordered{{"name", c.name}, {"tolerance", c.tolerance}, {"max_violation", c.max_violation},
                             {"pass", c.pass}, {"hard", c.hard}});
  o["checks"] = checks;
  ordered records = ordered::array();
  for (const auto& rec : r.records) {
    ordered values = ordered::array();
    for (const auto& v : rec.values)
      values.push_back(ordered{{"name", v.name}, {"value", v.value}, {"method", v.method}, {"guarantee", v.guarantee}});
    records.push_back(ordered{{"check", rec.check}, {"inputs_hash", rec.inputs_hash}, {"values", values},
                              {"violation", rec.violation}, {"pass", rec.pass}});
  }
  o["records"] = records;
  o["notes"] = r.notes;
  return o.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical radius and numerical index estimates on nested p-sum spaces"};
  app.require_subcommand(1);
  app.footer(
      "Environment: NUMIDX_SEED sets the default root seed, NUMIDX_THREADS the worker count.\n"
      "Exit codes: 0 success, 1 check violated, 2 input error.\n"
      "Descriptors: lp(p=<number|inf>, dim=<n>) | psum(p=<number|inf>, [<child>, ...]) | scalar,\n"
      "optionally with field=real|complex on the root.");

  Common common;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> threads_flag;
  app.add_option("--seed", seed_flag, "Root seed (default: NUMIDX_SEED or a fixed constant)");
  app.add_option("--threads", threads_flag, "Worker threads (default: NUMIDX_THREADS or 1)");

  RadiusArgs ra;
  CLI::App* radius = app.add_subcommand("radius", "Numerical radius of an operator (or polynomial) from a JSON file");
  radius->add_option("--space", ra.space, "Descriptor text (overrides the file's descriptor)");
  radius->add_option("--matrix", ra.matrix, "Operator or polynomial JSON file")->required();
  radius->add_option("--field", ra.field, "real|complex (overrides the file)");
  radius->add_option("--method", ra.method, "auto|ascent|enumerate|grid");
  radius->add_option("--resolution", ra.resolution, "Grid resolution (samples per half turn)");
  radius->add_option("--restarts", ra.restarts, "Ascent restarts (budget)");
  radius->add_flag("--absolute", ra.absolute, "Absolute numerical radius");
  radius->add_option("--out", ra.out, "Write a JSON report (plus manifest)");

  IndexArgs ia;
  CLI::App* index = app.add_subcommand("index", "Numerical index upper bound (best found)");
  index->add_option("--space", ia.space, "Descriptor text")->required();
  index->add_option("--field", ia.field, "real|complex");
  index->add_option("--budget", ia.budget, "Candidate operators to evaluate");
  index->add_option("--restarts", ia.restarts, "Inner ascent restarts per candidate");
  index->add_option("--rank", ia.rank, "Rank-r index (1 <= r <= dim)");
  index->add_flag("--absolute", ia.absolute, "Absolute index");
  index->add_option("--poly-k", ia.poly_k, "Polynomial index of order k");
  index->add_option("--out", ia.out, "Write a JSON report (plus manifest)");

  MpArgs ma;
  CLI::App* mp = app.add_subcommand("mp", "The constant M_p");
  mp->add_option("--p", ma.p, "Exponent p >= 1")->required();
  mp->add_option("--emit-curve", ma.curve, "Write the curve t -> |t^(p-1) - t|/(1 + t^p) as CSV");
  mp->add_option("--points", ma.points, "Curve intervals");

  SweepArgs sa;
  CLI::App* sweep = app.add_subcommand("sweep", "Index sweeps as CSV");
  sweep->add_option("--family", sa.family, "lpm (index of l_p^m along m) | lp2-curve (index of l_p^2 along p)")
      ->required();
  sweep->add_option("--p", sa.p, "Exponent or range a..b[:step] / list a,b,c");
  sweep->add_option("--m", sa.m, "Dimension or range");
  sweep->add_option("--field", sa.field, "real|complex");
  sweep->add_option("--budget", sa.budget, "Candidate operators per index estimate");
  sweep->add_option("--restarts", sa.restarts, "Inner ascent restarts per candidate");
  sweep->add_option("--out", sa.out, "CSV path (default: stdout)");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", va.suite, "lcc|gcc|sums|duality|bounds|all");
  verify->add_option("--space", va.space, "Descriptor (tower for lcc, sum for gcc, space for duality)");
  verify->add_option("--field", va.field, "real|complex");
  verify->add_option("--cases", va.cases, "Random operators per check");
  verify->add_option("--level", va.level, "lcc: level m");
  verify->add_option("--depth", va.depth, "lcc: depth j");
  verify->add_option("--blocks", va.blocks, "gcc: kept top-level blocks, e.g. 0,1");
  verify->add_option("--mode", va.mode, "sums: linf|l1");
  verify->add_option("--summands", va.summands, "sums: descriptors separated by ';'");
  verify->add_option("--p", va.p, "bounds: exponents (list or range)");
  verify->add_option("--m", va.m, "bounds: dimensions (list or range)");
  verify->add_option("--budget", va.budget, "Candidate operators per index estimate");
  verify->add_option("--restarts", va.restarts, "Ascent restarts per radius");
  verify->add_option("--out-dir", va.out_dir, "Directory for JSON reports and manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    common.seed = seed_flag ? *seed_flag : env_seed();
    common.threads = threads_flag ? *threads_flag : env_threads();
    if (common.threads < 1) throw ParseError("threads", "must be >= 1");
    if (radius->parsed()) return cmd_radius(ra, common, out);
    if (index->parsed()) return cmd_index(ia, common, out);
    if (mp->parsed()) return cmd_mp(ma, out);
    if (sweep->parsed()) return cmd_sweep(sa, common, out);
    if (verify->parsed()) return cmd_verify(va, common, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace numidx
