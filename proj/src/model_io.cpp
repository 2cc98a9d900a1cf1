#include "pst/model_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "pst/error.hpp"

namespace pst {

namespace {

std::vector<std::string> tokens(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(errc::kParse, "line " + std::to_string(line) + ": " + what);
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(line, "expected an integer, got '" + s + "'");
}

Rational parse_entry(const std::string& s, int line) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + s + "'");
  }
}

Energy parse_value(const std::string& s, int line) {
  try {
    return parse_energy(s);
  } catch (const std::exception&) {
    fail(line, "expected an energy or inf, got '" + s + "'");
  }
}

struct PendingTerm {
  int line = 0;
  std::vector<Site> support;
  std::vector<std::optional<Energy>> values;
  std::optional<Energy> fallback;
  bool sealed = false;  // no more site lines once a value is given
};

}  // namespace

Model parse_model(std::string_view text) {
  Model m;
  std::optional<int> dimension;
  Matrix basis;
  int basis_line = 0;  // last line of the geometry block
  std::vector<Vector> offsets;
  std::optional<SpinSpace> spins;
  std::optional<PendingTerm> term;
  std::vector<std::pair<int, PendingTerm>> done;
  bool geometry_ready = false;

  auto need_dimension = [&](int line) {
    if (!dimension) fail(line, "dimension must come first");
    return *dimension;
  };
  auto ensure_geometry = [&](int line) {
    if (geometry_ready) return;
    const int d = need_dimension(line);
    if (static_cast<int>(basis.size()) != d) fail(line, "basis needs " + std::to_string(d) + " rows");
    if (offsets.empty()) offsets.push_back(Vector(d, Rational(0)));
    try {
      m.geometry = PointSet(basis, offsets);
    } catch (const Error& e) {
      fail(basis_line, e.what());
    }
    geometry_ready = true;
  };

  std::istringstream in{std::string(text)};
  int line = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line;
    const auto tok = tokens(raw);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    const std::size_t nargs = tok.size() - 1;

    if (term) {
      if (key == "site") {
        if (term->sealed) fail(line, "site lines must precede value lines");
        const int d = m.dimension();
        if (nargs != static_cast<std::size_t>(d) && nargs != static_cast<std::size_t>(d) + 1)
          fail(line, "site needs " + std::to_string(d) + " coordinates and an optional offset index");
        Site s;
        for (int i = 0; i < d; ++i) {
          s.t[i] = parse_int(tok[1 + i], line);
          if (s.t[i] != 0 && s.t[i] != 1) fail(line, "site lies outside the unit cell cube");
        }
        if (nargs == static_cast<std::size_t>(d) + 1) s.k = parse_int(tok[d + 1], line);
        if (s.k < 0 || s.k >= m.num_offsets()) fail(line, "offset index out of range");
        for (const auto& t : term->support)
          if (t == s) fail(line, "repeated site in term");
        term->support.push_back(s);
      } else if (key == "value") {
        if (term->support.empty()) fail(line, "term has no sites");
        if (!term->sealed) {
          std::size_t size = 1;
          for (std::size_t i = 0; i < term->support.size(); ++i) size *= m.num_spins();
          term->values.assign(size, std::nullopt);
          term->sealed = true;
        }
        if (nargs != term->support.size() + 1) fail(line, "value needs one symbol per site and an energy");
        std::vector<Spin> pattern;
        for (std::size_t i = 0; i < term->support.size(); ++i) {
          const auto s = m.spins.find(tok[1 + i]);
          if (!s) fail(line, "unknown spin symbol '" + tok[1 + i] + "'");
          pattern.push_back(*s);
        }
        std::size_t idx = 0;
        for (Spin s : pattern) idx = idx * m.num_spins() + s;
        if (term->values[idx]) fail(line, "pattern listed twice");
        term->values[idx] = parse_value(tok.back(), line);
      } else if (key == "default") {
        if (nargs != 1) fail(line, "default needs one energy");
        term->fallback = parse_value(tok[1], line);
      } else if (key == "end") {
        if (term->support.empty()) fail(line, "term has no sites");
        if (!term->sealed) {
          std::size_t size = 1;
          for (std::size_t i = 0; i < term->support.size(); ++i) size *= m.num_spins();
          term->values.assign(size, std::nullopt);
        }
        InteractionTerm t;
        t.support = term->support;
        for (const auto& v : term->values) {
          if (!v && !term->fallback) fail(line, "term leaves patterns without a value and has no default");
          t.values.push_back(v ? *v : *term->fallback);
        }
        m.terms.push_back(std::move(t));
        term.reset();
      } else {
        fail(line, "unexpected '" + key + "' inside a term block");
      }
      continue;
    }

    if (key == "name") {
      if (nargs != 1) fail(line, "name takes one token");
      m.name = tok[1];
    } else if (key == "dimension") {
      if (dimension) fail(line, "dimension given twice");
      if (nargs != 1) fail(line, "dimension takes one integer");
      dimension = parse_int(tok[1], line);
      if (*dimension < 2 || *dimension > kMaxDim)
        fail(line, "dimension must be between 2 and " + std::to_string(kMaxDim));
    } else if (key == "basis") {
      const int d = need_dimension(line);
      if (geometry_ready) fail(line, "basis after the geometry was fixed");
      if (nargs != static_cast<std::size_t>(d)) fail(line, "basis row needs " + std::to_string(d) + " entries");
      if (static_cast<int>(basis.size()) == d) fail(line, "too many basis rows");
      Vector row;
      for (std::size_t i = 1; i <= nargs; ++i) row.push_back(parse_entry(tok[i], line));
      basis.push_back(std::move(row));
      basis_line = line;
    } else if (key == "offset") {
      const int d = need_dimension(line);
      if (geometry_ready) fail(line, "offset after the geometry was fixed");
      if (nargs != static_cast<std::size_t>(d)) fail(line, "offset needs " + std::to_string(d) + " entries");
      Vector v;
      for (std::size_t i = 1; i <= nargs; ++i) v.push_back(parse_entry(tok[i], line));
      offsets.push_back(std::move(v));
      basis_line = line;
    } else if (key == "spins") {
      if (spins) fail(line, "spins given twice");
      if (nargs < 1) fail(line, "spins needs at least one symbol");
      try {
        spins = SpinSpace(std::vector<std::string>(tok.begin() + 1, tok.end()));
      } catch (const Error& e) {
        fail(line, e.what());
      }
      m.spins = *spins;
    } else if (key == "collar") {
      if (nargs != 1) fail(line, "collar takes one integer");
      m.collar = parse_int(tok[1], line);
      if (*m.collar < 0) fail(line, "collar must be nonnegative");
    } else if (key == "term") {
      ensure_geometry(line);
      if (!spins) fail(line, "spins must precede terms");
      if (nargs != 0) fail(line, "term takes no arguments");
      term = PendingTerm{};
      term->line = line;
    } else {
      fail(line, "unknown keyword '" + key + "'");
    }
  }
  if (term) fail(term->line, "term block is not closed by end");
  ensure_geometry(line);
  if (!spins) fail(line, "missing spins line");
  try {
    m.validate();
  } catch (const Error& e) {
    fail(line, e.what());
  }
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::kInvalidInput, "cannot open model file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_model(os.str());
}

std::string serialize_model(const Model& m) {
  std::ostringstream os;
  const int d = m.dimension();
  if (!m.name.empty()) os << "name " << m.name << "\n";
  os << "dimension " << d << "\n";
  for (const auto& row : m.geometry.basis()) {
    os << "basis";
    for (const auto& v : row) os << " " << to_string(v);
    os << "\n";
  }
  for (const auto& o : m.geometry.offsets()) {
    os << "offset";
    for (const auto& v : o) os << " " << to_string(v);
    os << "\n";
  }
  os << "spins";
  for (const auto& s : m.spins.symbols()) os << " " << s;
  os << "\n";
  if (m.collar) os << "collar " << *m.collar << "\n";
  const std::size_t S = m.num_spins();
  for (const auto& t : m.terms) {
    os << "term\n";
    for (const auto& s : t.support) {
      os << "  site";
      for (int i = 0; i < d; ++i) os << " " << s.t[i];
      os << " " << s.k << "\n";
    }
    std::vector<Spin> pattern(t.support.size(), 0);
    for (const auto& v : t.values) {
      os << "  value";
      for (Spin s : pattern) os << " " << m.spins.symbol(s);
      os << " " << to_string(v) << "\n";
      for (std::size_t j = pattern.size(); j-- > 0;) {
        if (++pattern[j] < S) break;
        pattern[j] = 0;
      }
    }
    os << "end\n";
  }
  return os.str();
}

}  // namespace pst
