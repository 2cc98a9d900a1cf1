#include "pst/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "pst/contours.hpp"
#include "pst/error.hpp"
#include "pst/expansion.hpp"
#include "pst/groundstates.hpp"
#include "pst/model_io.hpp"
#include "pst/reduction.hpp"

namespace pst {

namespace {

std::string real_text(const Real& r) {
  if (isinf(r)) return r > 0 ? "inf" : "-inf";
  return r.str(20, std::ios_base::scientific);
}

std::string site_text(const Site& s, int d) {
  std::string out = "(";
  for (int i = 0; i < d; ++i) out += (i ? "," : "") + std::to_string(s.t[i]);
  if (s.k != 0) out += ";" + std::to_string(s.k);
  return out + ")";
}

std::string sites_text(const std::vector<Site>& sites, int d) {
  std::string out;
  for (const auto& s : sites) out += site_text(s, d);
  return out.empty() ? "-" : out;
}

std::string spins_text(const std::vector<Spin>& spins, const Model& m) {
  std::string out;
  for (Spin s : spins) out += (out.empty() ? "" : ",") + m.spins.symbol(s);
  return out.empty() ? "-" : out;
}

std::string flag(bool b) { return b ? "yes" : "no"; }

Region box_region(const Model& m, int side) {
  Cell extent{};
  for (int i = 0; i < m.dimension(); ++i) extent[i] = side;
  return Region::box(m.dimension(), Cell{}, extent, static_cast<int>(m.num_offsets()));
}

Region torus_region(const Model& m, int side) {
  Cell periods{};
  for (int i = 0; i < m.dimension(); ++i) periods[i] = side;
  return Region::torus(m.dimension(), periods, static_cast<int>(m.num_offsets()));
}

Spin boundary_label(const RunConfig& c, const Model& m, const ContourContext* ctx) {
  if (!c.bc.empty()) return m.spins.index_of(c.bc);
  if (ctx) return ctx->ground.front();
  return 0;
}

Cell parse_cell(const std::string& text, int d) {
  Cell out{};
  std::stringstream ss(text);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= d) throw Error(errc::kInvalidInput, "site \"" + text + "\" has too many coordinates");
    try {
      out[i++] = std::stoi(part);
    } catch (const std::exception&) {
      throw Error(errc::kInvalidInput, "site \"" + text + "\" is not a list of integers");
    }
  }
  if (i != d) throw Error(errc::kInvalidInput, "site \"" + text + "\" needs " + std::to_string(d) + " coordinates");
  return out;
}

struct Outcome {
  std::vector<Record> records;
  bool pass = true;
};

Record model_record(const Model& m) {
  return Record{"model", {}}
      .add("name", m.name)
      .add("dimension", std::to_string(m.dimension()))
      .add("offsets", std::to_string(m.num_offsets()))
      .add("spins", std::to_string(m.num_spins()))
      .add("terms", std::to_string(m.terms.size()))
      .add("collar", std::to_string(m.richness_collar()));
}

Record contour_record(const Contour& c, const Rational& phi, const Model& m) {
  const int d = m.dimension();
  std::string interior;
  for (const auto& comp : c.interior)
    interior += (interior.empty() ? "" : "|") + m.spins.symbol(comp.label) + ":" + sites_text(comp.sites, d);
  return Record{"contour", {}}
      .add("sign", m.spins.symbol(c.sign))
      .add("size", std::to_string(c.support.size()))
      .add("energy", to_string(phi))
      .add("support", sites_text(c.support, d))
      .add("pattern", spins_text(c.pattern, m))
      .add("interior", interior.empty() ? "-" : interior);
}

void cmd_validate(const RunConfig& c, const Model& m, Outcome& o) {
  o.records.push_back(model_record(m));
  const int collar = c.collar.value_or(m.richness_collar());
  const RichnessVerdict v = check_richness(m, collar, c.window, c.cap);
  Record r{"richness", {}};
  r.add("verdict", v.pass ? "PASS" : "FAIL")
      .add("collar", std::to_string(v.collar))
      .add("window", std::to_string(v.window))
      .add("regions", std::to_string(v.regions_checked))
      .add("partial", flag(v.partial));
  o.records.push_back(r);
  if (v.witness) {
    const int d = m.dimension();
    o.records.push_back(Record{"witness", {}}
                            .add("inner", sites_text(v.witness->inner, d))
                            .add("inner_spins", spins_text(v.witness->inner_spins, m))
                            .add("far", sites_text(v.witness->far, d))
                            .add("far_spins", spins_text(v.witness->far_spins, m))
                            .add("no_inner_configuration", flag(v.witness->no_inner_configuration)));
  }
  o.pass = v.pass;
}

void cmd_groundstates(const RunConfig& c, const Model& m, Outcome& o) {
  const GroundStateSearch g = find_ground_states(m, c.period);
  o.records.push_back(Record{"groundstates", {}}
                          .add("period_cap", std::to_string(g.period_cap))
                          .add("count", std::to_string(g.states.size()))
                          .add("energy", to_string(g.energy)));
  for (const auto& s : g.states) {
    const GroundStateVerdict v = verify_ground_state(s, m, c.window);
    o.records.push_back(Record{"state", {}}
                            .add("label", s.label)
                            .add("period", std::to_string(s.period()))
                            .add("constant", flag(s.is_constant()))
                            .add("verified", v.pass ? "PASS" : "FAIL")
                            .add("regions", std::to_string(v.regions_checked)));
    o.pass = o.pass && v.pass;
  }
  for (const auto& w : g.warnings) o.records.push_back(Record{"warning", {}}.add("message", w));
}

void cmd_reduce(const RunConfig& c, const Model& m, Outcome& o) {
  const GroundStateSearch g = find_ground_states(m, c.period);
  const int l = c.block.value_or(choose_block(m, g.states));
  const BlockCode code = block_reduce(m, l);
  o.records.push_back(Record{"reduction", {}}
                          .add("block", std::to_string(l))
                          .add("source_spins", std::to_string(m.num_spins()))
                          .add("target_spins", std::to_string(code.target.num_spins()))
                          .add("target_terms", std::to_string(code.target.terms.size())));
  for (const auto& s : g.states) {
    const PeriodicState t = lift_state(code, s);
    o.records.push_back(Record{"state", {}}
                            .add("source", s.label)
                            .add("target", t.label)
                            .add("constant", flag(t.is_constant())));
    o.pass = o.pass && t.is_constant();
  }
}

void cmd_contours(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  const Spin q = boundary_label(c, m, &ctx);
  const auto contours = enumerate_contours(ctx, q, c.kmax, Site{});
  o.records.push_back(Record{"contours", {}}
                          .add("sign", m.spins.symbol(q))
                          .add("kmax", std::to_string(c.kmax))
                          .add("count", std::to_string(contours.size())));
  for (const auto& k : contours) o.records.push_back(contour_record(k, contour_energy(ctx, k), m));
}

void cmd_peierls(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  const PeierlsReport p = peierls_estimate(ctx, c.kmax);
  Record r{"peierls", {}};
  r.add("kmax", std::to_string(p.kmax))
      .add("tau", p.tau ? to_string(*p.tau) : "none")
      .add("contours", std::to_string(p.contours))
      .add("entropy_bound", flag(p.entropy_bound_holds));
  o.records.push_back(r);
  if (!p.tau) o.records.push_back(Record{"warning", {}}.add("message", "no contour up to kmax"));
  if (p.witness) o.records.push_back(contour_record(*p.witness, p.witness_energy, m));
  o.pass = p.tau.has_value() && *p.tau > Rational(0) && p.entropy_bound_holds;
}

void cmd_zexact(const RunConfig& c, const Model& m, Outcome& o) {
  const Region region = c.torus ? torus_region(m, c.box) : box_region(m, c.box);
  const BoundaryCondition bc =
      c.torus ? BoundaryCondition{FreeBc{}} : constant_bc(boundary_label(c, m, nullptr), m);
  for (const Rational& beta : c.betas) {
    const OracleReport z = z_exact(region, bc, beta, m, c.cap);
    o.records.push_back(Record{"zexact", {}}
                            .add("beta", to_string(beta))
                            .add("box", std::to_string(c.box))
                            .add("torus", flag(c.torus))
                            .add("bc", c.torus ? "-" : m.spins.symbol(boundary_label(c, m, nullptr)))
                            .add("log_z", real_text(z.value))
                            .add("configurations", std::to_string(z.count)));
    for (const auto& w : z.warnings) o.records.push_back(Record{"warning", {}}.add("message", w));
  }
}

void cmd_zcontour(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  const Spin q = boundary_label(c, m, &ctx);
  const ContourHistogram h = contour_histogram(ctx, box_region(m, c.box), q, c.cap);
  for (const Rational& beta : c.betas)
    o.records.push_back(Record{"zcontour", {}}
                            .add("beta", to_string(beta))
                            .add("box", std::to_string(c.box))
                            .add("bc", m.spins.symbol(q))
                            .add("log_z", real_text(h.log_partition(beta)))
                            .add("families", std::to_string(h.families)));
}

Record free_energy_record(const FreeEnergyReport& f, const Model& m) {
  Record r{"freeenergy", {}};
  r.add("sign", m.spins.symbol(f.label))
      .add("beta", to_string(f.beta))
      .add("kmax", std::to_string(f.kmax))
      .add("ground_energy", to_string(f.ground_energy))
      .add("series", real_text(f.series))
      .add("free_energy", real_text(f.free_energy))
      .add("contours", std::to_string(f.contours))
      .add("clusters", std::to_string(f.clusters))
      .add("tau", f.tau ? to_string(*f.tau) : "none")
      .add("convergence", f.convergence.certified ? "certified" : "not_certified");
  return r;
}

void cmd_freeenergy(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  std::vector<Spin> labels = ctx.ground;
  if (!c.bc.empty()) labels = {m.spins.index_of(c.bc)};
  for (const Rational& beta : c.betas)
    for (Spin q : labels) o.records.push_back(free_energy_record(free_energy_truncated(ctx, q, beta, c.kmax), m));
}

void cmd_phases(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  for (const Rational& beta : c.betas) {
    const PhaseReport p = stable_phases(ctx, beta, c.kmax);
    for (const auto& e : p.phases)
      o.records.push_back(Record{"phase", {}}
                              .add("sign", m.spins.symbol(e.report.label))
                              .add("beta", to_string(beta))
                              .add("kmax", std::to_string(c.kmax))
                              .add("free_energy", real_text(e.report.free_energy))
                              .add("gap", real_text(e.gap))
                              .add("status", e.stable ? "stable" : "metastable"));
  }
}

void cmd_correlate(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  const Spin q = boundary_label(c, m, &ctx);
  const Region region = box_region(m, c.box);
  Spin other = q;
  for (Spin s : ctx.ground)
    if (s != q) other = s;
  if (other == q) other = static_cast<Spin>((q + 1) % m.num_spins());
  std::vector<std::string> flips = c.flips;
  if (flips.empty()) {
    std::string centre;
    for (int i = 0; i < m.dimension(); ++i) centre += (i ? "," : "") + std::to_string(c.box / 2);
    flips.push_back(centre);
  }
  std::vector<Spin> chi(region.size(), q);
  for (const auto& f : flips) {
    const auto idx = region.index_of(Site{parse_cell(f, m.dimension()), 0});
    if (!idx) throw Error(errc::kInvalidInput, "site " + f + " is outside the box");
    chi[*idx] = other;
  }
  Extractor ex(ctx, region, q);
  const ContourFamily fam = ex.extract(chi);
  for (const Rational& beta : c.betas) {
    const CorrelationReport r = contour_correlation(ctx, fam.contours, region, q, beta, c.cap);
    o.records.push_back(Record{"correlate", {}}
                            .add("beta", to_string(beta))
                            .add("box", std::to_string(c.box))
                            .add("bc", m.spins.symbol(q))
                            .add("contours", std::to_string(fam.contours.size()))
                            .add("exact", real_text(r.exact))
                            .add("resummed", real_text(r.resummed)));
    for (const auto& w : r.warnings) o.records.push_back(Record{"warning", {}}.add("message", w));
  }
}

void cmd_decay(const RunConfig& c, const Model& m, Outcome& o) {
  const ContourContext ctx = ContourContext::make(m);
  const Spin q = boundary_label(c, m, &ctx);
  for (const Rational& beta : c.betas) {
    const DecayReport d = decay_diagnostic(m, q, beta, c.box, c.box, c.distances);
    for (std::size_t i = 0; i < d.distances.size(); ++i)
      o.records.push_back(Record{"correlation", {}}
                              .add("beta", to_string(beta))
                              .add("distance", std::to_string(d.distances[i]))
                              .add("value", real_text(d.correlations[i])));
    std::ostringstream slope, residual;
    slope << std::setprecision(12) << d.slope;
    residual << std::setprecision(12) << d.residual_norm;
    o.records.push_back(Record{"decay", {}}
                            .add("beta", to_string(beta))
                            .add("box", std::to_string(c.box))
                            .add("bc", m.spins.symbol(q))
                            .add("determinate", flag(d.determinate))
                            .add("slope", d.determinate ? slope.str() : "-")
                            .add("residual_norm", d.determinate ? residual.str() : "-"));
    o.pass = o.pass && d.determinate && d.slope < 0;
  }
}

void cmd_bounds(const RunConfig& c, const Model& m, Outcome& o) {
  for (const Rational& beta : c.betas) {
    const BoundsReport b = bounds_check(m, beta, c.window, c.cap);
    for (const auto& row : b.rows)
      o.records.push_back(Record{"bounds_row", {}}
                              .add("beta", to_string(beta))
                              .add("side", std::to_string(row.side))
                              .add("volume", std::to_string(row.volume))
                              .add("boundary", std::to_string(row.boundary))
                              .add("conditions", std::to_string(row.conditions))
                              .add("min_log_z", real_text(row.min_log_z))
                              .add("max_log_z", real_text(row.max_log_z)));
    Record r{"bounds", {}};
    r.add("beta", to_string(beta))
        .add("verdict", b.pass ? "PASS" : "FAIL")
        .add("volume_constant", real_text(b.volume_constant))
        .add("boundary_constant", real_text(b.boundary_constant))
        .add("witness", b.witness.value_or("-"))
        .add("reason", b.reason.empty() ? "-" : b.reason);
    o.records.push_back(r);
    o.pass = o.pass && b.pass;
  }
}

std::string quoted(const std::string& v) {
  if (!v.empty() && v.find_first_of(" \t\"=") == std::string::npos) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_records(std::ostream& out, const std::vector<Record>& records, OutputFormat format) {
  if (format == OutputFormat::kRecords) {
    for (const auto& r : records) {
      out << r.kind;
      for (const auto& [k, v] : r.fields) out << ' ' << k << '=' << quoted(v);
      out << '\n';
    }
    return;
  }
  // Consecutive records of one kind form a table with a header row.
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    while (j < records.size() && records[j].kind == records[i].kind) ++j;
    const auto& head = records[i].fields;
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) width[c] = head[c].first.size();
    for (std::size_t r = i; r < j; ++r)
      for (std::size_t c = 0; c < records[r].fields.size() && c < width.size(); ++c)
        width[c] = std::max(width[c], records[r].fields[c].second.size());
    out << "[" << records[i].kind << "]\n";
    for (std::size_t c = 0; c < head.size(); ++c) out << std::left << std::setw(static_cast<int>(width[c]) + 2) << head[c].first;
    out << '\n';
    for (std::size_t r = i; r < j; ++r) {
      for (std::size_t c = 0; c < records[r].fields.size() && c < width.size(); ++c)
        out << std::left << std::setw(static_cast<int>(width[c]) + 2) << records[r].fields[c].second;
      out << '\n';
    }
    i = j;
  }
}

std::string resolve_model_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  const fs::path bundled = fs::path(PST_SOURCE_DIR) / "models" / fs::path(path).filename();
  if (fs::exists(bundled)) return bundled.string();
  return path;
}

int run(const RunConfig& config, std::ostream& out) {
  using Handler = void (*)(const RunConfig&, const Model&, Outcome&);
  static const std::map<std::string, Handler> commands = {
      {"validate", cmd_validate},   {"groundstates", cmd_groundstates}, {"reduce", cmd_reduce},
      {"contours", cmd_contours},   {"peierls", cmd_peierls},           {"zexact", cmd_zexact},
      {"zcontour", cmd_zcontour},   {"freeenergy", cmd_freeenergy},     {"correlate", cmd_correlate},
      {"decay", cmd_decay},         {"phases", cmd_phases},             {"bounds", cmd_bounds}};
  Outcome o;
  try {
    const auto it = commands.find(config.command);
    if (it == commands.end()) throw Error(errc::kInvalidInput, "unknown command \"" + config.command + "\"");
    if (config.model_path.empty()) throw Error(errc::kInvalidInput, "no model given");
    if (config.kmax < 1 || config.box < 1 || config.window < 1 || config.period < 1 || config.cap == 0)
      throw Error(errc::kInvalidInput, "caps must be positive");
    for (const Rational& b : config.betas)
      if (b < Rational(0)) throw Error(errc::kInvalidInput, "beta must be nonnegative");
    const Model m = load_model(resolve_model_path(config.model_path));
    it->second(config, m, o);
  } catch (const Error& e) {
    o.records.push_back(Record{"error", {}}.add("code", e.code()).add("message", e.what()));
    write_records(out, o.records, config.format);
    return kErrorExit;
  } catch (const std::exception& e) {
    o.records.push_back(Record{"error", {}}.add("code", "internal").add("message", e.what()));
    write_records(out, o.records, config.format);
    return kErrorExit;
  }
  o.records.push_back(Record{"status", {}}.add("command", config.command).add("result", o.pass ? "PASS" : "FAIL"));
  write_records(out, o.records, config.format);
  return o.pass ? kPass : kFail;
}

}  // namespace pst
