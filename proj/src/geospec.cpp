#include "kosmann/geospec.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kosmann/chart.hpp"
#include "kosmann/checks.hpp"
#include "kosmann/error.hpp"
#include "kosmann/tomlmini.hpp"

namespace kosmann {

namespace {

struct Loader {
  const std::string& path;
  const TomlDocument& doc;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ValidationError(path + ":" + std::to_string(line) + ": " + msg);
  }

  const TomlValue& need(const TomlSection& sec, const std::string& key) const {
    const TomlValue* v = sec.find(key);
    if (v == nullptr)
      fail(sec.line, "[" + sec.name + "] is missing the key '" + key + "'");
    return *v;
  }

  double number(const TomlSection& sec, const TomlValue& v) const {
    if (v.kind != TomlValue::Kind::Number)
      fail(v.line, "[" + sec.name + "] expected a number");
    return v.num;
  }

  std::string text(const TomlSection& sec, const TomlValue& v) const {
    if (v.kind != TomlValue::Kind::String)
      fail(v.line, "[" + sec.name + "] expected a string");
    return v.str;
  }

  const std::vector<TomlValue>& array(const TomlSection& sec, const TomlValue& v) const {
    if (v.kind != TomlValue::Kind::Array)
      fail(v.line, "[" + sec.name + "] expected an array");
    return v.items;
  }

  SF expr(const TomlSection& sec, const TomlValue& v,
          const std::vector<std::string>& coords, const std::string& what) const {
    const std::string src = text(sec, v);
    try {
      return sf_expr(parse_expression(src, coords));
    } catch (const ParseError& e) {
      fail(v.line, "[" + sec.name + "] " + what + ": " + e.what());
    }
  }

  std::vector<SF> expr_row(const TomlSection& sec, const TomlValue& v,
                           const std::vector<std::string>& coords,
                           const std::string& what) const {
    std::vector<SF> out;
    int i = 0;
    for (const TomlValue& item : array(sec, v))
      out.push_back(expr(sec, item, coords, what + "[" + std::to_string(i++) + "]"));
    return out;
  }
};

}  // namespace

const VectorFieldSpec* GeometrySpec::find_field(const std::string& name) const {
  for (const auto& f : vfields)
    if (f.name == name) return &f;
  return nullptr;
}

double GeometrySpec::tolerance(const std::string& key, double fallback) const {
  for (const auto& [k, v] : tolerances)
    if (k == key) return v;
  return fallback;
}

std::vector<std::vector<double>> GeometrySpec::points(int count,
                                                      std::uint64_t seed) const {
  return sample_box(chart.box, count, seed);
}

GeometrySpec load_spec_text(const std::string& textSrc, const std::string& displayPath) {
  TomlDocument doc;
  try {
    doc = parse_toml(textSrc);
  } catch (const ParseError& e) {
    throw ParseError(displayPath + ": " + e.what(), e.offset);
  }
  const Loader L{displayPath, doc};
  GeometrySpec spec;
  spec.path = displayPath;

  // chart
  const auto chartSections = doc.with_prefix("chart.");
  if (chartSections.empty())
    throw ValidationError(displayPath + ": no [chart.<name>] section");
  if (chartSections.size() > 1)
    L.fail(chartSections[1]->line, "only one chart per file is supported");
  const TomlSection& chartSec = *chartSections.front();
  spec.chart.name = chartSec.name.substr(std::string("chart.").size());
  for (const TomlValue& c : L.array(chartSec, L.need(chartSec, "coords")))
    spec.chart.coords.push_back(L.text(chartSec, c));
  if (spec.chart.coords.empty())
    L.fail(chartSec.line, "chart has no coordinates");
  for (std::size_t i = 0; i < spec.chart.coords.size(); ++i)
    for (std::size_t j = i + 1; j < spec.chart.coords.size(); ++j)
      if (spec.chart.coords[i] == spec.chart.coords[j])
        L.fail(chartSec.line, "duplicate coordinate '" + spec.chart.coords[i] + "'");
  const int n = spec.chart.dim();
  const TomlValue& boxV = L.need(chartSec, "box");
  for (const TomlValue& pair : L.array(chartSec, boxV)) {
    const auto& ends = L.array(chartSec, pair);
    if (ends.size() != 2)
      L.fail(pair.line, "box entries are [lo, hi] pairs");
    const double lo = L.number(chartSec, ends[0]);
    const double hi = L.number(chartSec, ends[1]);
    if (!(lo < hi)) L.fail(pair.line, "box entry has lo >= hi");
    spec.chart.box.push_back({lo, hi});
  }
  if (static_cast<int>(spec.chart.box.size()) != n)
    L.fail(boxV.line, "box has " + std::to_string(spec.chart.box.size()) +
                          " entries for " + std::to_string(n) + " coordinates");
  const TomlValue& sigV = L.need(chartSec, "signature");
  const auto& sigArr = L.array(chartSec, sigV);
  if (sigArr.size() != 2)
    L.fail(sigV.line, "signature is [minus-count, plus-count]");
  spec.sig.p = static_cast<int>(L.number(chartSec, sigArr[0]));
  spec.sig.q = static_cast<int>(L.number(chartSec, sigArr[1]));
  if (spec.sig.p < 0 || spec.sig.q < 0 || spec.sig.dim() != n)
    L.fail(sigV.line, "signature does not sum to the chart dimension");

  // coframe
  const TomlSection* coSec = doc.find("coframe");
  if (coSec == nullptr)
    throw ValidationError(displayPath + ": no [coframe] section");
  if (const TomlValue* cn = coSec->find("chart");
      cn != nullptr && L.text(*coSec, *cn) != spec.chart.name)
    L.fail(cn->line, "[coframe] names an unknown chart");
  const TomlValue& rowsV = L.need(*coSec, "rows");
  spec.coframe.sig = spec.sig;
  for (const TomlValue& row : L.array(*coSec, rowsV)) {
    std::vector<SF> comps = L.expr_row(*coSec, row, spec.chart.coords, "row");
    if (static_cast<int>(comps.size()) != n)
      L.fail(row.line, "[coframe] row has " + std::to_string(comps.size()) +
                           " components for a " + std::to_string(n) + "-dimensional chart");
    spec.coframe.e.push_back(std::move(comps));
  }
  if (spec.coframe.dim() != n)
    L.fail(rowsV.line, "[coframe] has " + std::to_string(spec.coframe.dim()) +
                           " rows for a " + std::to_string(n) + "-dimensional chart");

  // vector fields
  for (const TomlSection* sec : doc.with_prefix("vectorfield.")) {
    VectorFieldSpec vf;
    vf.name = sec->name.substr(std::string("vectorfield.").size());
    vf.field.dim = n;
    vf.field.comps = L.expr_row(*sec, L.need(*sec, "comps"), spec.chart.coords, "comps");
    if (static_cast<int>(vf.field.comps.size()) != n)
      L.fail(sec->line, "[" + sec->name + "] has " +
                            std::to_string(vf.field.comps.size()) + " components");
    if (const TomlValue* k = sec->find("killing")) {
      if (k->kind != TomlValue::Kind::Bool)
        L.fail(k->line, "[" + sec->name + "] 'killing' must be true or false");
      vf.killing = k->boolean;
    }
    spec.vfields.push_back(std::move(vf));
  }

  // gauge matrices
  for (const TomlSection* sec : doc.with_prefix("gauge.")) {
    GaugeSpec gs;
    gs.name = sec->name.substr(std::string("gauge.").size());
    gs.gamma = form_zero(matrix_space(n), 0, n);
    const TomlValue& matV = L.need(*sec, "matrix");
    const auto& rows = L.array(*sec, matV);
    if (static_cast<int>(rows.size()) != n)
      L.fail(matV.line, "[" + sec->name + "] matrix must be " + std::to_string(n) +
                            " rows");
    for (int i = 0; i < n; ++i) {
      std::vector<SF> row = L.expr_row(*sec, rows[static_cast<std::size_t>(i)],
                                       spec.chart.coords, "matrix row");
      if (static_cast<int>(row.size()) != n)
        L.fail(matV.line, "[" + sec->name + "] matrix rows must have " +
                              std::to_string(n) + " entries");
      for (int j = 0; j < n; ++j)
        gs.gamma.comps[static_cast<std::size_t>(i * n + j)][0] =
            row[static_cast<std::size_t>(j)];
    }
    spec.gauges.push_back(std::move(gs));
  }

  // reduction block
  if (const TomlSection* sec = doc.find("kk")) {
    spec.kk.present = true;
    for (const TomlValue& f : L.array(*sec, L.need(*sec, "fields"))) {
      const std::string name = L.text(*sec, f);
      if (spec.find_field(name) == nullptr)
        L.fail(f.line, "[kk] references unknown vector field '" + name + "'");
      spec.kk.fieldNames.push_back(name);
    }
    if (spec.kk.fieldNames.empty()) L.fail(sec->line, "[kk] lists no fields");
    for (const TomlValue& p : L.array(*sec, L.need(*sec, "periods")))
      spec.kk.periods.push_back(L.number(*sec, p));
    if (spec.kk.periods.size() != spec.kk.fieldNames.size())
      L.fail(sec->line, "[kk] needs one period per field");
    for (double p : spec.kk.periods)
      if (!(p > 0)) L.fail(sec->line, "[kk] periods must be positive");
    if (const TomlValue* axes = sec->find("monopole_axes")) {
      for (const TomlValue& a : L.array(*sec, *axes)) {
        const int axis = static_cast<int>(L.number(*sec, a));
        if (axis < 0 || axis >= n)
          L.fail(a.line, "[kk] monopole axis out of range");
        spec.kk.monopoleAxes.push_back(axis);
      }
      if (spec.kk.monopoleAxes.size() != 2)
        L.fail(axes->line, "[kk] flux quadrature needs exactly two axes");
      const TomlValue& bounds = L.need(*sec, "monopole_bounds");
      for (const TomlValue& pair : L.array(*sec, bounds)) {
        const auto& ends = L.array(*sec, pair);
        if (ends.size() != 2) L.fail(pair.line, "[kk] bounds are [lo, hi] pairs");
        spec.kk.monopoleBounds.push_back(
            {L.number(*sec, ends[0]), L.number(*sec, ends[1])});
      }
      if (spec.kk.monopoleBounds.size() != 2)
        L.fail(bounds.line, "[kk] flux quadrature needs two bounds pairs");
    }
  }

  // spinor fields
  for (const TomlSection* sec : doc.with_prefix("spinor.")) {
    SpinorSpec sp;
    sp.name = sec->name.substr(std::string("spinor.").size());
    const int ns = 1 << (n / 2);
    sp.psi = spinor_zero(ns, 0, n);
    std::vector<SF> re = L.expr_row(*sec, L.need(*sec, "re"), spec.chart.coords, "re");
    if (static_cast<int>(re.size()) != ns)
      L.fail(sec->line, "[" + sec->name + "] needs " + std::to_string(ns) +
                            " components");
    for (int a = 0; a < ns; ++a) sp.psi.re[static_cast<std::size_t>(a)][0] = re[static_cast<std::size_t>(a)];
    if (const TomlValue* imV = sec->find("im")) {
      std::vector<SF> im = L.expr_row(*sec, *imV, spec.chart.coords, "im");
      if (static_cast<int>(im.size()) != ns)
        L.fail(imV->line, "[" + sec->name + "] needs " + std::to_string(ns) +
                              " components");
      for (int a = 0; a < ns; ++a) sp.psi.im[static_cast<std::size_t>(a)][0] = im[static_cast<std::size_t>(a)];
    }
    spec.spinors.push_back(std::move(sp));
  }

  // tolerances
  if (const TomlSection* sec = doc.find("tolerances"))
    for (const auto& [key, v] : sec->entries) {
      const double tol = L.number(*sec, v);
      if (!(tol > 0)) L.fail(v.line, "[tolerances] values must be positive");
      spec.tolerances.emplace_back(key, tol);
    }

  // expectations
  if (const TomlSection* sec = doc.find("expect"))
    for (const auto& [key, v] : sec->entries) {
      if (key == "phi") {
        spec.expect.phi = L.expr(*sec, v, spec.chart.coords, "phi");
      } else if (key == "monopole") {
        spec.expect.monopole = L.number(*sec, v);
      } else if (is_suite_name(key) && key != "all") {
        if (v.kind != TomlValue::Kind::Bool)
          L.fail(v.line, "[expect] verdicts must be true or false");
        spec.expect.suites.emplace_back(key, v.boolean);
      } else {
        L.fail(v.line, "[expect] key '" + key + "' is not a check suite");
      }
    }

  return spec;
}

GeometrySpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_spec_text(buf.str(), path);
}

}  // namespace kosmann
