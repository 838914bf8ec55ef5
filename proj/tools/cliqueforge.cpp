#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "cliqueforge/decomp.hpp"
#include "cliqueforge/density.hpp"
#include "cliqueforge/divfixer.hpp"
#include "cliqueforge/fractional.hpp"
#include "cliqueforge/gadgets.hpp"
#include "cliqueforge/graph.hpp"
#include "cliqueforge/pipeline.hpp"
#include "cliqueforge/randmodels.hpp"
#include "json.hpp"

using namespace cliqueforge;
using json = nlohmann::ordered_json;

namespace {

// Domain failure: the command ran but the answer is "no" (exit 1).
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad flags or inputs (exit 2).
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Vertex> parse_list(const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Vertex>(v));
    } catch (const std::exception&) {
      throw Usage("bad integer list: " + text);
    }
  }
  return out;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  std::optional<std::uint64_t> s = flag ? flag : seed_from_env();
  if (!s) throw Usage("randomized command needs --seed or CLIQUEFORGE_SEED");
  std::cerr << "seed: " << *s << "\n";
  return *s;
}

json edges_json(const Graph& g) {
  json a = json::array();
  for (const Edge& e : g.edges()) a.push_back({e.u, e.v});
  return a;
}

Graph graph_from_json(const json& edges, std::size_t n) {
  Graph g(n);
  for (const auto& e : edges) {
    const Vertex a = e.at(0).get<Vertex>(), b = e.at(1).get<Vertex>();
    if (std::max(a, b) >= g.vertex_count()) g = g.united(Graph(std::max(a, b) + 1));
    g.add_edge(a, b);
  }
  return g;
}

Packing packing_from_json(const json& cliques, int q) {
  Packing p;
  p.q = q;
  for (const auto& c : cliques) p.cliques.push_back(c.get<Clique>());
  return p;
}

std::string load_text(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw Usage("cannot read " + path);
  return read_text_file(path);
}
Graph load_graph(const std::string& path) { return parse_graph(load_text(path)); }

std::string mpq_str(const mpq_class& x) { return x.get_num().get_str() + "/" + x.get_den().get_str(); }

// Sidecar of a gadget, with the extra graphs a bundle needs for re-verification.
void write_gadget(const Graph& g, const std::string& sidecar, const std::string& out) {
  emit(serialize_graph(g), out);
  const std::string side = out.empty() || out == "-" ? std::string() : out + ".json";
  if (!side.empty()) write_text_file(side, sidecar);
  else std::cout << sidecar;
}

std::string bundle_sidecar(GadgetKind kind, int q, const std::vector<Vertex>& roots,
                           const std::map<std::string, Packing>& certs, const std::map<std::string, Graph>& extra) {
  json j = json::parse(gadget_sidecar(kind, q, roots, certs));
  for (const auto& [name, g] : extra) j[name] = edges_json(g);
  return j.dump(2) + "\n";
}

void print_violations(const std::vector<std::string>& v) {
  const std::size_t shown = std::min<std::size_t>(v.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) std::cout << "violation: " << v[i] << "\n";
  if (v.size() > shown) std::cout << "... " << v.size() - shown << " more violations\n";
}

void print_report(const BundleReport& r, bool as_json) {
  if (as_json) {
    std::cout << json{{"valid", r.valid}, {"violations", r.violations}}.dump() << "\n";
  } else {
    std::cout << (r.valid ? "valid" : "invalid") << "\n";
    print_violations(r.violations);
  }
  if (!r.valid) throw Failure("verification failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cliqueforge: clique packing toolkit"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");
  std::function<void()> action;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random graph");
  gen->require_subcommand(1);
  std::size_t n = 0, d = 0;
  std::string p_text, out;
  std::optional<std::uint64_t> seed;
  int q = 3;
  {
    auto* s = gen->add_subcommand("gnp", "G(n, p)");
    s->add_option("--n", n)->required();
    s->add_option("--p", p_text)->required();
    s->add_option("--seed", seed);
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] { emit(serialize_graph(gnp(n, Probability::parse(p_text), resolve_seed(seed))), out); };
    });
    auto* r = gen->add_subcommand("gnd", "random d-regular graph");
    r->add_option("--n", n)->required();
    r->add_option("--d", d)->required();
    r->add_option("--seed", seed);
    r->add_option("-o,--out", out);
    r->callback([&] { action = [&] { emit(serialize_graph(gnd(n, d, resolve_seed(seed))), out); }; });
  }

  // gadget
  auto* gadget = app.add_subcommand("gadget", "build a gadget with its certificates");
  gadget->require_subcommand(1);
  int k = 2;
  std::string in, type = "anti-clique";
  {
    auto* s = gadget->add_subcommand("anti-edge", "anti-edge on roots {0,1}");
    s->add_option("--q", q)->required();
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        const GadgetGraph g = anti_edge(q);
        write_gadget(g.rooted.graph(), gadget_sidecar(g.kind, q, g.rooted.roots(), {}), out);
      };
    });
    s = gadget->add_subcommand("fake-edge", "fake edge on roots {0,1}");
    s->add_option("--q", q)->required();
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        const GadgetGraph g = fake_edge(q);
        write_gadget(g.rooted.graph(), gadget_sidecar(g.kind, q, g.rooted.roots(), {}), out);
      };
    });
    s = gadget->add_subcommand("nabla", "tilde-nabla of a graph, rooted at its vertices");
    s->add_option("--q", q)->required();
    s->add_option("--in", in)->required();
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        const Graph x = load_graph(in);
        const NablaResult r = nabla(q, x);
        std::vector<Vertex> roots(x.vertex_count());
        std::iota(roots.begin(), roots.end(), 0);
        Packing tilde{q, r.tilde_cliques()};
        json j = json::parse(gadget_sidecar(GadgetKind::absorber, q, roots, {{"tilde", tilde}}));
        j["kind"] = "nabla";
        write_gadget(r.graph, j.dump(2) + "\n", out);
      };
    });
    s = gadget->add_subcommand("transformer", "star transformer");
    s->add_option("--q", q)->required();
    s->add_option("--k", k, "even parameter for q = 3");
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        const TransformerBundle b = star_transformer(q, k);
        write_gadget(b.T.graph(),
                     bundle_sidecar(GadgetKind::transformer, q, b.T.roots(),
                                    {{"TL", b.decomp_TL}, {"TL_prime", b.decomp_TL_prime}},
                                    {{"L", b.L}, {"L_prime", b.L_prime}}),
                     out);
      };
    });
    s = gadget->add_subcommand("absorber", "absorber for an anti-clique, a nabla graph, a given L or an omni reserve");
    s->add_option("--q", q)->required();
    s->add_option("--k", k);
    s->add_option("--type", type, "anti-clique | nabla | trivial | omni")
        ->check(CLI::IsMember({"anti-clique", "nabla", "trivial", "omni"}));
    s->add_option("--in", in, "L (nabla, trivial) or X (omni)");
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        if (type != "anti-clique" && in.empty()) throw Usage("--in is required for --type " + type);
        if (type == "omni") {
          const NaiveOmniAbsorber a = naive_omni_absorber(load_graph(in), q);
          std::map<std::string, Packing> certs;
          for (std::size_t i = 0; i < a.table.size(); ++i) {
            certs["A_" + std::to_string(i)] = a.table[i].decomp_A_L;
            certs["LA_" + std::to_string(i)] = a.table[i].decomp_LA_L;
          }
          write_gadget(a.A.graph(), gadget_sidecar(GadgetKind::absorber, q, a.A.roots(), certs), out);
          return;
        }
        AbsorberBundle b;
        if (type == "anti-clique") {
          b = anti_clique_absorber(q, k);
        } else if (type == "trivial") {
          b = trivial_absorber(load_graph(in), q);
        } else {
          const Graph L = load_graph(in);
          const AbsorberBundle booster = anti_clique_absorber(q, k);
          const AbsorberBundle base = L.edges() == booster.L.edges() ? booster : trivial_absorber(L, q);
          b = nabla_absorber(L, base, booster);
        }
        write_gadget(b.A.graph(),
                     bundle_sidecar(GadgetKind::absorber, q, b.A.roots(), {{"A", b.decomp_A}, {"LA", b.decomp_LA}},
                                    {{"L", b.L}}),
                     out);
      };
    });
  }

  // density
  auto* density = app.add_subcommand("density", "rooted densities and degeneracy");
  std::string roots_text, kind = "rooted2", method = "auto";
  density->add_option("--in", in)->required();
  density->add_option("--roots", roots_text, "comma-separated root vertices");
  density->add_option("--kind", kind, "rooted2 | rooted | two | degeneracy")
      ->check(CLI::IsMember({"rooted2", "rooted", "two", "degeneracy"}));
  density->add_option("--method", method, "auto | enumeration | flow")
      ->check(CLI::IsMember({"auto", "enumeration", "flow"}));
  density->callback([&] {
    action = [&] {
      const Graph g = load_graph(in);
      const std::vector<Vertex> roots = parse_list(roots_text);
      DensityOptions o;
      o.method = method == "flow" ? DensityMethod::flow
                 : method == "enumeration" ? DensityMethod::enumeration
                                           : DensityMethod::automatic;
      json j;
      std::string value;
      if (kind == "degeneracy") {
        const DegeneracyResult r = rooted_degeneracy(g, roots);
        value = std::to_string(r.degeneracy);
        j = {{"degeneracy", r.degeneracy}, {"ordering", r.ordering}};
      } else if (kind == "two") {
        const DensityResult r = max_2_density(g, o);
        value = r.value.str();
        j = {{"value", value}, {"witness", r.witness}};
      } else if (kind == "rooted") {
        const DensityResult r = max_rooted_density(RootedGraph(g, roots), o);
        value = r.value.str();
        j = {{"value", value}, {"witness", r.witness}};
      } else {
        const Rooted2Density r = rooted_2_density(RootedGraph(g, roots), o);
        value = r.value.str();
        j = {{"value", value},
             {"rooted", r.rooted.str()},
             {"two", r.two ? json(r.two->str()) : json(nullptr)},
             {"witness", r.witness}};
      }
      std::cout << (as_json ? j.dump() : value) << "\n";
    };
  });

  // fixer
  auto* fixer = app.add_subcommand("fixer", "divisibility fixers");
  fixer->require_subcommand(1);
  std::uint64_t m = 0;
  std::string d_text;
  bool simple = false;
  {
    auto* s = fixer->add_subcommand("build", "fixer blueprint on n path vertices");
    s->add_option("--q", q)->required();
    s->add_option("--n", n)->required();
    s->add_flag("--simple", simple, "replace extra parallel copies by fake edges");
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        FixerBlueprint bp = build_fixer_blueprint(q, n);
        if (simple) bp = simplify_fixer(bp);
        emit(fixer_json(bp), out);
      };
    });
    s = fixer->add_subcommand("select", "residue-correcting selection");
    s->add_option("--q", q)->required();
    s->add_option("--n", n)->required();
    s->add_option("--m", m, "edge-count residue mod q(q-1)")->required();
    s->add_option("--d", d_text, "degree residues mod q-1, comma-separated")->required();
    s->add_flag("--simple", simple, "print the simple-form lift instead of the multigraph");
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        const FixerBlueprint bp = build_fixer_blueprint(q, n);
        SelectRequest req;
        req.m = m;
        for (Vertex v : parse_list(d_text)) req.d.push_back(static_cast<std::uint32_t>(v));
        const MultiGraph sel = inductive_select(bp, req);
        if (simple) {
          emit(serialize_graph(lift_selection(simplify_fixer(bp), sel)), out);
          return;
        }
        json edges = json::array();
        for (const auto& [e, c] : sel.multiplicities()) edges.push_back({e.u, e.v, c});
        emit(json{{"q", q}, {"n", n}, {"edges", sel.edge_count()}, {"multiplicities", edges}}.dump(2) + "\n", out);
      };
    });
    s = fixer->add_subcommand("apply", "embed a fixer in a graph and delete the correcting edges");
    s->add_option("--q", q)->required();
    s->add_option("--in", in)->required();
    s->add_option("--seed", seed);
    s->add_option("-o,--out", out, "graph after deletion");
    s->callback([&] {
      action = [&] {
        const Graph g = load_graph(in);
        const Seed sd(resolve_seed(seed));
        Rng path_rng = sd.stream("path");
        const auto order = find_path_power(g, q - 2, path_rng, 2'000'000, 6);
        if (!order) throw Failure("no spanning path power found");
        EmbedOptions eo;
        eo.seed = sd.derive("embed");
        const auto fx = embed_fixer(simplify_fixer(build_fixer_blueprint(q, g.vertex_count())), g, *order, eo);
        if (!fx) throw Failure("fixer embedding failed");
        const FixResult r = apply_fixer(g, *fx, q);
        const bool div = is_kq_divisible(r.graph, q);
        if (!out.empty()) write_text_file(out, serialize_graph(r.graph));
        if (as_json)
          std::cout << json{{"fixer_edges", fx->graph.edge_count()}, {"deleted", r.deleted.size()}, {"divisible", div}}.dump()
                    << "\n";
        else
          std::cout << "fixer edges " << fx->graph.edge_count() << ", deleted " << r.deleted.size()
                    << (div ? ", divisible\n" : ", NOT divisible\n");
        if (out.empty() && !as_json) std::cout << serialize_graph(r.graph);
        if (!div) throw Failure("result is not divisible");
      };
    });
  }

  // pack
  auto* pack = app.add_subcommand("pack", "run the packing pipeline on a random graph");
  pack->require_subcommand(1);
  std::string packing_out;
  for (const char* model : {"gnp", "gnd"}) {
    auto* s = pack->add_subcommand(model, std::string("pack ") + model);
    s->add_option("--n", n)->required();
    if (std::string(model) == "gnp")
      s->add_option("--p", p_text)->required();
    else
      s->add_option("--d", d)->required();
    s->add_option("--q", q);
    s->add_option("--seed", seed);
    s->add_option("-o,--out", packing_out, "write the packing");
    const std::string name = model;
    s->callback([&, name] {
      action = [&, name] {
        const std::uint64_t sd = resolve_seed(seed);
        const PackResult r = name == "gnp" ? pack_gnp(n, Probability::parse(p_text), q, sd) : pack_gnd(n, d, q, sd);
        if (!packing_out.empty()) write_text_file(packing_out, serialize_packing(r.packing));
        if (as_json) {
          std::cout << r.report.json() << "\n";
        } else {
          const StageTally& t = r.report.stages;
          std::cout << "edges " << r.report.edges << ", fixer " << to_string(r.report.fixer) << "\n"
                    << "stages: fixer_deleted " << t.fixer_deleted << ", nibble " << t.nibble << ", reserve "
                    << t.reserve << ", absorbed " << t.absorbed << ", residual " << t.residual << "\n"
                    << "leave " << r.report.leave << " (optimal bound " << r.report.optimal_leave << "), "
                    << (r.report.valid ? "valid" : "INVALID") << ", " << static_cast<std::int64_t>(r.report.ms)
                    << " ms\n";
        }
        if (!r.report.valid) throw Failure("invalid packing");
      };
    });
  }

  // fractional
  auto* frac = app.add_subcommand("fractional", "fractional decompositions");
  frac->require_subcommand(1);
  int r_param = 2;
  std::string weights, mode = "decomposition", d_rat;
  {
    auto* s = frac->add_subcommand("gadget", "edge gadget on e = {0..r-1}, J = {r..r+q-1}");
    s->add_option("--q", q)->required();
    s->add_option("--r", r_param);
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        std::vector<Vertex> e(static_cast<std::size_t>(r_param)), J(static_cast<std::size_t>(q));
        std::iota(e.begin(), e.end(), 0);
        std::iota(J.begin(), J.end(), static_cast<Vertex>(r_param));
        const EdgeGadget g = edge_gadget(q, r_param, e, J);
        const bool holds = gadget_property_holds(g);
        CliqueWeighting w;
        w.q = q;
        w.weights = g.psi;
        if (as_json)
          std::cout << json{{"q", q}, {"r", r_param}, {"max_abs", mpq_str(g.max_abs)},
                            {"within_bound", g.within_bound}, {"property_holds", holds}}
                           .dump()
                    << "\n";
        if (!as_json || !out.empty()) emit(serialize_weighting(w), out);
        if (!holds) throw Failure("gadget property fails");
      };
    });
    s = frac->add_subcommand("boost", "fractional K_q-decomposition by boosting the uniform weighting");
    s->add_option("--q", q)->required();
    s->add_option("--in", in)->required();
    s->add_option("-o,--out", out);
    s->callback([&] {
      action = [&] {
        const Graph g = load_graph(in);
        BoostResult b;
        try {
          b = fractional_kq_decomposition(g, q);
        } catch (const CannotBoost& e) {
          throw Failure(e.what());
        }
        if (as_json)
          std::cout << json{{"cliques", b.weighting.weights.size()}, {"weights_in_range", b.weights_in_range},
                            {"max_deviation", mpq_str(b.max_deviation)}, {"max_correction", mpq_str(b.max_correction)},
                            {"alpha_condition", mpq_str(b.alpha_condition)},
                            {"verified", verify_fractional(g, b.weighting, FractionalMode::decomposition)}}
                           .dump()
                    << "\n";
        if (!as_json || !out.empty()) emit(serialize_weighting(b.weighting), out);
      };
    });
    s = frac->add_subcommand("verify", "exact check of a weighting");
    s->add_option("--graph", in)->required();
    s->add_option("--weights", weights)->required();
    s->add_option("--mode", mode)->check(CLI::IsMember({"packing", "decomposition"}));
    s->callback([&] {
      action = [&] {
        const bool ok = verify_fractional(load_graph(in), parse_weighting(load_text(weights)),
                                          mode == "packing" ? FractionalMode::packing : FractionalMode::decomposition);
        std::cout << (as_json ? json{{"valid", ok}}.dump() : std::string(ok ? "valid" : "invalid")) << "\n";
        if (!ok) throw Failure("weighting fails");
      };
    });
    s = frac->add_subcommand("sample", "keep each clique with probability psi(Q) D / 2");
    s->add_option("--weights", weights)->required();
    s->add_option("--D", d_rat, "rational, e.g. 18 or 7/2")->required();
    s->add_option("--seed", seed);
    s->add_option("-o,--out", out, "selected cliques as a packing file");
    s->callback([&] {
      action = [&] {
        mpq_class D;
        if (D.set_str(d_rat, 10) != 0) throw Usage("bad rational --D: " + d_rat);
        D.canonicalize();
        Rng rng = Seed(resolve_seed(seed)).stream("sample");
        const CliqueWeighting w = parse_weighting(load_text(weights));
        const CliqueSample smp = sample_regular_cliques(w, D, rng);
        json hist = json::object();
        for (const auto& [deg, cnt] : smp.histogram) hist[std::to_string(deg)] = cnt;
        const json j{{"selected", smp.selected.size()}, {"max_deviation", mpq_str(smp.max_deviation)},
                     {"histogram", hist}};
        if (!out.empty()) write_text_file(out, serialize_packing(Packing{w.q, smp.selected}));
        if (as_json) {
          std::cout << j.dump() << "\n";
        } else {
          std::cout << "selected " << smp.selected.size() << ", max deviation " << mpq_str(smp.max_deviation) << "\n";
          for (const auto& [deg, cnt] : smp.histogram) std::cout << "degree " << deg << ": " << cnt << " edges\n";
        }
      };
    });
  }

  // verify
  auto* verify = app.add_subcommand("verify", "certificate checks");
  verify->require_subcommand(1);
  std::string packing_in, sidecar;
  std::size_t edge_cap = 10;
  {
    for (const char* what : {"packing", "decomposition"}) {
      auto* s = verify->add_subcommand(what, std::string("check a ") + what);
      s->add_option("--graph", in)->required();
      s->add_option("--packing", packing_in)->required();
      const bool decomposition = std::string(what) == "decomposition";
      s->callback([&, decomposition] {
        action = [&, decomposition] {
          const Graph g = load_graph(in);
          const Packing p = parse_packing(load_text(packing_in));
          const PackingReport r = verify_packing(g, p);
          const bool ok = r.valid && (!decomposition || r.leave.edge_count() == 0);
          std::vector<std::string> violations = r.violations;
          if (r.valid && decomposition && !ok)
            violations.push_back(std::to_string(r.leave.edge_count()) + " edges uncovered");
          if (as_json) {
            std::cout << json{{"valid", ok}, {"covered", r.covered_edge_count}, {"leave", r.leave.edge_count()},
                              {"optimal_leave", optimal_leave_number(g, p.q)}, {"violations", violations}}
                             .dump()
                      << "\n";
          } else {
            std::cout << (ok ? "valid" : "invalid") << ", leave " << r.leave.edge_count() << "\n";
            print_violations(violations);
          }
          if (!ok) throw Failure("verification failed");
        };
      });
    }
    for (const char* what : {"transformer", "absorber"}) {
      auto* s = verify->add_subcommand(what, std::string("check a ") + what + " and its sidecar certificates");
      s->add_option("--graph", in)->required();
      s->add_option("--sidecar", sidecar, "defaults to <graph>.json");
      const bool transformer = std::string(what) == "transformer";
      s->callback([&, transformer] {
        action = [&, transformer] {
          const Graph g = load_graph(in);
          json j;
          try {
            j = json::parse(load_text(sidecar.empty() ? in + ".json" : sidecar));
          } catch (const json::exception& e) {
            throw Usage(std::string("bad sidecar: ") + e.what());
          }
          try {
            const int qq = j.at("q").get<int>();
            const auto roots = j.at("roots").get<std::vector<Vertex>>();
            const auto& certs = j.at("certificates");
            if (transformer) {
              TransformerBundle b;
              b.q = qq;
              b.T = RootedGraph(g, roots);
              b.L = graph_from_json(j.at("L"), g.vertex_count());
              b.L_prime = graph_from_json(j.at("L_prime"), g.vertex_count());
              b.decomp_TL = packing_from_json(certs.at("TL"), qq);
              b.decomp_TL_prime = packing_from_json(certs.at("TL_prime"), qq);
              print_report(verify_transformer(b), as_json);
            } else {
              AbsorberBundle b;
              b.q = qq;
              b.A = RootedGraph(g, roots);
              b.L = graph_from_json(j.at("L"), g.vertex_count());
              b.decomp_A = packing_from_json(certs.at("A"), qq);
              b.decomp_LA = packing_from_json(certs.at("LA"), qq);
              print_report(verify_absorber(b), as_json);
            }
          } catch (const json::exception& e) {
            throw Usage(std::string("bad sidecar: ") + e.what());
          }
        };
      });
    }
    auto* s = verify->add_subcommand("omni", "check that A absorbs every divisible subgraph of X");
    s->add_option("--x", in, "reserve graph X")->required();
    s->add_option("--absorber", packing_in, "absorber graph A; X's vertices are its roots")->required();
    s->add_option("--q", q);
    s->add_option("--edge-cap", edge_cap);
    s->callback([&] {
      action = [&] {
        const Graph x = load_graph(in);
        const Graph a = load_graph(packing_in);
        std::vector<Vertex> roots;
        for (Vertex v = 0; v < x.vertex_count(); ++v)
          if (x.degree(v) > 0) roots.push_back(v);
        OmniOptions o;
        o.edge_cap = edge_cap;
        const OmniReport r = verify_omni_absorber(x, RootedGraph(a, roots), q, o);
        if (as_json)
          std::cout << json{{"valid", r.valid}, {"divisible_subgraphs", r.divisible_subgraphs}, {"failures", r.failures},
                            {"budget_exhausted", r.budget_exhausted}, {"refinement", r.refinement}}
                           .dump()
                    << "\n";
        else
          std::cout << (r.valid ? "valid" : "invalid") << ": " << r.divisible_subgraphs << " divisible subgraphs, "
                    << r.failures << " failures, " << r.budget_exhausted << " undecided\n";
        if (!r.valid) throw Failure("omni-absorber check failed");
      };
    });
  }

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "seeded pipeline benchmark");
  std::vector<std::string> rows;
  std::size_t trials = 1, threads = 1;
  bool with_time = false;
  bench_cmd->add_option("--row", rows, "gnp:N:P[:Q] or gnd:N:D[:Q]; repeatable")->required();
  bench_cmd->add_option("--trials", trials);
  bench_cmd->add_option("--threads", threads);
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_flag("--time", with_time, "include wall-clock times in the JSON");
  bench_cmd->add_option("-o,--out", out);
  bench_cmd->callback([&] {
    action = [&] {
      BenchConfig cfg;
      for (const std::string& text : rows) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() < 3 || parts.size() > 4 || (parts[0] != "gnp" && parts[0] != "gnd"))
          throw Usage("bad --row: " + text);
        BenchRow row;
        row.model = parts[0];
        try {
          row.n = std::stoul(parts[1]);
          if (row.model == "gnp")
            row.p = Probability::parse(parts[2]);
          else
            row.d = std::stoul(parts[2]);
          if (parts.size() == 4) row.q = std::stoi(parts[3]);
        } catch (const std::logic_error&) {
          throw Usage("bad --row: " + text);
        }
        cfg.rows.push_back(row);
      }
      cfg.trials = trials;
      cfg.threads = threads;
      cfg.with_time = with_time;
      cfg.master_seed = resolve_seed(seed);
      const auto start = std::chrono::steady_clock::now();
      emit(bench(cfg), out);
      std::cerr << "wall time: "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (!action) return 2;
  try {
    action();
  } catch (const Failure& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 1;
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
