// Command-line front end: analyze, symmetries, height, fibres, render, graph.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "subshift/subshift.hpp"

using namespace subshift;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string file;
  bool json = false;
};

std::string aperiodicity_note(const Manifest& m) {
  return m.assert_aperiodic ? "conditional on aperiodicity (user-asserted)" : "aperiodicity not asserted; results assume it";
}

std::string shape_text(const Manifest& m) {
  std::string s = serialize_manifest(m);
  auto p = s.find("shape: ");
  return s.substr(p + 7, s.find('\n', p) - p - 7);
}

json sets_json(const Substitution& sub, const std::vector<LetterSet>& sets) {
  json a = json::array();
  for (const auto& s : sets) a.push_back(format_set(sub.names(), s));
  return a;
}

AxisSet parse_axes(const std::string& text, std::size_t dim) {
  AxisSet J;
  if (text.empty()) return J;
  std::size_t start = 0;
  for (;;) {
    std::size_t c = text.find(',', start);
    std::string tok = text.substr(start, c - start);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size() || v < 1 || static_cast<std::size_t>(v) > dim)
      throw InputError("invalid axis '" + tok + "' (axes are 1.." + std::to_string(dim) + ")");
    J.push_back(static_cast<std::size_t>(v - 1));
    if (c == std::string::npos) break;
    start = c + 1;
  }
  return normalize_axes(J, dim);
}

int cmd_analyze(const Common& c) {
  Manifest m = load_manifest(c.file);
  Substitution sub = m.substitution();
  auto viol = validate_digit_system(sub.system());
  Primitivity pr = is_primitive(sub);
  json j;
  j["name"] = m.name;
  j["dimension"] = sub.dim();
  j["shape"] = shape_text(m);
  j["alphabet"] = sub.names();
  j["digit_system_violations"] = viol;
  j["primitive"] = pr.primitive;
  if (pr.primitive) j["primitivity_exponent"] = pr.exponent;
  if (!c.json) {
    std::cout << "name: " << m.name << "\n";
    std::cout << "dimension: " << sub.dim() << "\n";
    std::cout << "shape: " << shape_text(m) << "\n";
    std::cout << "alphabet: " << sub.alphabet_size() << " letter(s)\n";
    std::cout << "digit system: " << (viol.empty() ? "ok" : "invalid") << "\n";
    for (const auto& v : viol) std::cout << "  violation: " << v << "\n";
    std::cout << "primitive: " << (pr.primitive ? "yes (exponent " + std::to_string(pr.exponent) + ")" : "no") << "\n";
  }
  if (!viol.empty()) throw InputError("invalid digit system: " + viol.front());
  if (!pr.primitive) throw HypothesisViolation("substitution is not primitive", "NotPrimitive");
  CoincidenceGraph g = coincidence_graph(sub);
  MinimalSetFamily fam = idempotent_realization_power(sub);
  j["coincidence_vertices"] = g.vertex_count();
  j["column_number"] = fam.column_number;
  j["minimal_sets"] = sets_json(sub, fam.sets);
  j["realization_power"] = fam.realization_power;
  json addr = json::array();
  for (std::size_t i = 0; i < fam.sets.size(); ++i)
    addr.push_back({{"set", format_set(sub.names(), fam.sets[i])}, {"address", fam.idempotent_addresses[i]}});
  j["idempotent_addresses"] = addr;
  j["note"] = aperiodicity_note(m);
  if (c.json) {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "coincidence graph: " << g.vertex_count() << " vertices\n";
  std::cout << "column number: " << fam.column_number << "\n";
  std::cout << "minimal sets:";
  for (const auto& s : fam.sets) std::cout << " " << format_set(sub.names(), s);
  std::cout << "\n";
  std::cout << "realization power k*: " << fam.realization_power << "\n";
  for (std::size_t i = 0; i < fam.sets.size(); ++i)
    std::cout << "  idempotent for " << format_set(sub.names(), fam.sets[i]) << " at " << format_address(fam.idempotent_addresses[i]) << "\n";
  std::cout << "note: " << aperiodicity_note(m) << "\n";
  return 0;
}

int cmd_symmetries(const Common& c, bool no_filter, bool no_prune) {
  Manifest m = load_manifest(c.file);
  Substitution sub = m.substitution();
  SearchOptions opts;
  opts.height_filter = !no_filter;
  opts.prune = !no_prune;
  opts.candidates = m.candidates();
  SearchReport rep = enumerate_supertile_shuffling(sub, opts);
  if (!c.json) {
    std::cout << format_report(rep, sub);
    return 0;
  }
  json j;
  j["level"] = rep.level;
  j["column_number"] = rep.column_number;
  j["bijective_mode"] = rep.bijective_mode;
  if (rep.gamma) j["height_lattice"] = rep.gamma->basis();
  j["height_trivial"] = rep.height_trivial;
  json f = json::array();
  for (const auto& s : rep.found) f.push_back({{"tau", cycle_notation(s.tau, &sub.names())}, {"A", s.A}, {"level", s.level}});
  j["found"] = f;
  j["psi_image"] = rep.psi_image;
  j["group"] = rep.group_name;
  json r = json::array();
  for (const auto& x : rep.rejected) {
    json e{{"A", x.A}, {"reason", x.reason}};
    if (x.conditions_evaluated) e["conditions_fail"] = x.conditions_also_fail;
    r.push_back(e);
  }
  j["rejected"] = r;
  j["notes"] = rep.notes;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_height(const Common& c) {
  Manifest m = load_manifest(c.file);
  Substitution sub = m.substitution();
  HeightResult h = height_lattice(sub);
  HeightData hd = alphabet_partition(sub, h.gamma);
  if (c.json) {
    json j;
    j["return_module"] = h.return_module.basis();
    j["height_lattice"] = h.gamma.basis();
    j["trivial"] = h.trivial();
    j["scanned_level"] = h.scanned_level;
    j["stabilized"] = h.stabilized;
    j["coprime"] = h.coprime;
    j["minimal"] = h.minimal;
    json p = json::object();
    for (std::size_t a = 0; a < sub.alphabet_size(); ++a) p[sub.name(static_cast<Letter>(a))] = hd.partition[a];
    j["partition"] = p;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "return module: " << h.return_module.to_string() << "\n";
  std::cout << "height lattice: " << h.gamma.to_string() << (h.trivial() ? " (trivial)" : "") << "\n";
  std::cout << "scanned level: " << h.scanned_level << (h.stabilized ? " (stabilized)" : " (cell cap reached)") << "\n";
  std::cout << "coprime with supertile lattice: " << (h.coprime ? "yes" : "no") << "\n";
  std::cout << "minimal: " << (h.minimal ? "yes" : "no") << "\n";
  std::cout << "partition:\n";
  auto classes = hd.classes();
  for (std::size_t i = 0; i < classes.size(); ++i)
    std::cout << "  " << format_vec(hd.fundamental_domain[i]) << ": " << format_set(sub.names(), classes[i]) << "\n";
  return 0;
}

int cmd_fibres(const Common& c, const std::string& point) {
  Manifest m = load_manifest(c.file);
  Substitution sub = m.substitution();
  require_block(sub);
  if (!point.empty()) {
    QadicPoint z = parse_qadic_point(point, sub.system().lengths());
    FibreReport r = fibre_cardinality(sub, z);
    if (c.json) {
      json j;
      j["point"] = format_qadic_point(z, sub.system().lengths());
      j["integer_axes"] = format_axes(r.J);
      j["cardinality"] = r.cardinality;
      j["regular"] = r.regular;
      j["irregular"] = r.irregular;
      j["periodic_point_count"] = r.periodic_point_count;
      json w = json::array();
      for (auto [v, ph] : r.witness) w.push_back({{"vertex", v}, {"phase", ph}});
      j["witness"] = w;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    std::cout << "point: " << format_qadic_point(z, sub.system().lengths()) << "\n";
    std::cout << "integer axes: " << format_axes(r.J) << "\n";
    std::cout << "cardinality: " << r.cardinality << (r.periodic_point_count ? " (periodic-point count)" : "") << "\n";
    std::cout << "regular value: " << r.regular << "\n";
    std::cout << "irregular: " << (r.irregular ? "yes" : "no") << "\n";
    if (!r.witness.empty()) {
      std::cout << "witness cycle:";
      for (auto [v, ph] : r.witness) std::cout << " (v" << v << "," << ph << ")";
      std::cout << "\n";
    }
    return 0;
  }
  FibreSpectrum sp = fibre_spectrum(sub);
  if (c.json) {
    json j;
    j["regular"] = sp.regular;
    json e = json::array();
    for (const auto& x : sp.entries) e.push_back({{"J", format_axes(x.J)}, {"kind", x.kind}, {"value", x.value}});
    j["entries"] = e;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "regular: " << sp.regular << "\n";
  for (const auto& x : sp.entries)
    std::cout << "J=" << format_axes(x.J) << " " << x.kind << ": " << x.value << (x.kind == "integer" ? " (periodic-point count)" : "") << "\n";
  return 0;
}

int cmd_render(const Common& c, const std::string& letter, std::size_t level, const std::string& ppm, int scale, bool quiet) {
  Manifest m = load_manifest(c.file);
  Substitution sub = m.substitution();
  Pattern p = supertile(sub, sub.letter(letter), level);
  Raster r = rasterize(p);
  if (!ppm.empty()) write_file(ppm, render_ppm(r, scale));
  if (c.json) {
    json j{{"letter", letter}, {"level", level}, {"cells", r.cell_count}, {"width", r.width}, {"height", r.height}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (!quiet) std::cout << render_ascii(r, sub);
  std::cout << "cells: " << r.cell_count << "\n";
  return 0;
}

int cmd_graph(const Common& c, const std::string& axes, bool pruned, const std::string& dot, bool edges) {
  Manifest m = load_manifest(c.file);
  Substitution sub = m.substitution();
  AxisSet J = parse_axes(axes, sub.dim());
  std::string out;
  if (pruned) {
    PrunedGraph pg = pruned_reversed_graph(sub, J);
    std::string nm = "pruned";
    for (std::size_t j : J) nm += "_" + std::to_string(j + 1);
    out = edges ? pruned_edge_list(pg) : pruned_to_dot(pg, nm);
  } else {
    Substitution s = J.empty() ? sub : derived_substitution(sub, J).sub;
    CoincidenceGraph g = coincidence_graph(s);
    if (edges) {
      for (std::size_t v = 0; v < g.vertex_count(); ++v)
        for (std::size_t t = 0; t < g.digit_count(); ++t)
          out += format_set(s.names(), g.vertices[v]) + " -> " + format_set(s.names(), g.vertices[g.target[v][t]]) + " [label=" +
                 digit_tuple(s.system(), t) + "]\n";
    } else {
      out = graph_to_dot(g, s, J.empty() ? "coincidence" : "derived");
    }
  }
  if (!dot.empty())
    write_file(dot, out);
  else
    std::cout << out;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis of Z^d substitution subshifts"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sc) {
    sc->add_option("file", common.file, "substitution manifest")->required();
    sc->add_flag("--json", common.json, "structured output");
  };

  auto* analyze = app.add_subcommand("analyze", "primitivity, column number, minimal sets");
  add_common(analyze);

  bool no_filter = false, no_prune = false;
  auto* sym = app.add_subcommand("symmetries", "supertile-shuffling extended symmetries");
  add_common(sym);
  sym->add_flag("--no-height-filter", no_filter, "skip the lattice admissibility filter");
  sym->add_flag("--no-prune", no_prune, "exhaustive letter-permutation search");

  auto* height = app.add_subcommand("height", "return module, height lattice, alphabet partition");
  add_common(height);

  std::string point;
  auto* fib = app.add_subcommand("fibres", "fibre spectrum or the fibre over one point");
  add_common(fib);
  fib->add_option("--point", point, "per-coordinate int:<v> or [pre:<digits>;]period:<digits>");

  std::string letter, ppm;
  std::size_t level = 1;
  int scale = 4;
  bool quiet = false;
  auto* render = app.add_subcommand("render", "supertile picture");
  add_common(render);
  render->add_option("--letter", letter, "seed letter")->required();
  render->add_option("--level", level, "supertile level");
  render->add_option("--ppm", ppm, "write a PPM image");
  render->add_option("--scale", scale, "pixels per cell");
  render->add_flag("--quiet", quiet, "omit the ASCII picture");

  std::string axes, dot;
  bool pruned = false, edges = false;
  auto* graph = app.add_subcommand("graph", "coincidence graphs as DOT");
  add_common(graph);
  graph->add_option("--J", axes, "derived axes, comma separated, 1-based");
  graph->add_flag("--pruned", pruned, "reversed graph without column-number vertices");
  graph->add_option("--dot", dot, "write to a file");
  graph->add_flag("--edges", edges, "edge-list text instead of DOT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (*analyze) return cmd_analyze(common);
    if (*sym) return cmd_symmetries(common, no_filter, no_prune);
    if (*height) return cmd_height(common);
    if (*fib) return cmd_fibres(common, point);
    if (*render) return cmd_render(common, letter, level, ppm, scale, quiet);
    if (*graph) return cmd_graph(common, axes, pruned, dot, edges);
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
