// Command-line front end for the kashaev library.

#include <gmpxx.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kashaev/json_io.hpp"
#include "kashaev/random.hpp"

using namespace kashaev;
using io::json;

namespace {

struct Options {
  std::string mode = "auto";
  double rel_tol = Tolerance{}.rel;
  double abs_tol = Tolerance{}.abs;
  unsigned jobs = 1;
  std::string out;
  bool timing = false;

  Tolerance tol() const { return {rel_tol, abs_tol}; }
};

struct Finished {
  json doc;
  int code = 0;
};

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

Mode pick_mode(const Options& o, const json* input) {
  bool floats = input && io::any_float(*input);
  if (o.mode == "float") return Mode::Float;
  if (o.mode == "exact") {
    if (floats) throw Error(ErrorKind::ModeMismatch, "--mode exact with float input values");
    return Mode::Exact;
  }
  return floats ? Mode::Float : Mode::Exact;
}

// Calls fn.template operator()<T>() with T chosen by the numeric mode.
template <class Fn>
Finished dispatch(Mode m, Fn&& fn) {
  if (m == Mode::Exact) return fn.template operator()<mpq_class>();
  return fn.template operator()<double>();
}

template <class T>
Finished verdict(Report<T> r, Mode m) {
  int code = r.empty() ? 0 : 1;
  return {io::report_json(std::move(r), m), code};
}

template <class T>
void append(Report<T>& a, Report<T> b) {
  for (auto& f : b) a.push_back(std::move(f));
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, "not an integer list: " + s);
    }
  return out;
}

template <class T>
std::vector<T> parse_params(const std::string& s) {
  std::vector<T> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if constexpr (std::is_same_v<T, double>) {
      if (item.find_first_of(".eE") != std::string::npos) out.push_back(std::stod(item));
      else out.push_back(io::parse_rational(item).get_d());
    } else {
      if (item.find_first_of(".eE") != std::string::npos) throw Error(ErrorKind::ModeMismatch, "float parameter in exact mode");
      out.push_back(io::parse_rational(item));
    }
  }
  return out;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::MissingValue:
    case ErrorKind::BadN:
    case ErrorKind::BadParams:
    case ErrorKind::ModeMismatch:
    case ErrorKind::InvalidComplex:
    case ErrorKind::InvalidPile:
    case ErrorKind::NeighborhoodIncomplete:
    case ErrorKind::UnlabeledVertex:
      return 2;
    default:
      return 1;
  }
}

void emit(const Options& o, const json& doc) {
  std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + o.out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kashaev equation, hexahedron recurrences and principal minors"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--mode", opt.mode, "numeric mode")->check(CLI::IsMember({"auto", "exact", "float"}));
  app.add_option("--rel-tol", opt.rel_tol, "relative tolerance for float mode");
  app.add_option("--abs-tol", opt.abs_tol, "absolute tolerance for float mode");
  app.add_option("--jobs", opt.jobs, "worker threads for per-cube checks")->check(CLI::Range(1u, 256u));
  app.add_option("--out", opt.out, "write the JSON result to this file");
  app.add_flag("--timing", opt.timing, "add elapsed seconds to the result");

  std::function<Finished()> action;
  std::string file;
  auto needs_file = [&](CLI::App* c) { c->add_option("file", file, "input JSON")->required(); };

  // kashaev ---------------------------------------------------------------
  auto* ka = app.add_subcommand("kashaev", "fields on a box of Z^3")->require_subcommand(1);
  auto* ka_check = ka->add_subcommand("check", "Kashaev equation on every cube; K-hexahedron equations when faces are given");
  needs_file(ka_check);
  ka_check->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto f = io::field3<T>(in);
        Report<T> r = check_kashaev(f.vertices, opt.tol(), opt.jobs);
        if (in.contains("faces")) append(r, check_khex(f, opt.tol(), opt.jobs));
        return verdict(std::move(r), m);
      });
    };
  });
  auto* ka_run = ka->add_subcommand("run", "positive Kashaev recurrence, or the K-hexahedron sweep when faces are given");
  needs_file(ka_run);
  std::optional<int> max_height;
  ka_run->add_option("--max-height", max_height, "stop after this height");
  ka_run->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto f = io::field3<T>(in);
        bool faces = in.contains("faces");
        if (faces) f = run_khex(std::move(f));
        else f.vertices = run_positive_kashaev(f.vertices, max_height);
        return Finished{io::field3_json(f, faces), 0};
      });
    };
  });
  auto* ka_ext = ka->add_subcommand("extend", "extend a coherent solution to a K-hexahedron field");
  needs_file(ka_ext);
  ka_ext->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto f = extend_to_khex(io::field3<T>(in).vertices, opt.tol());
        return Finished{io::field3_json(f, true), 0};
      });
    };
  });
  auto* ka_coh = ka->add_subcommand("coherence", "coherence at every interior vertex");
  needs_file(ka_coh);
  ka_coh->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() { return verdict(check_coherence_all(io::field3<T>(in).vertices, opt.tol(), opt.jobs), m); });
    };
  });

  // tiling ----------------------------------------------------------------
  auto* ti = app.add_subcommand("tiling", "rhombic tilings of the 2n-gon")->require_subcommand(1);
  int n = 0;
  auto* ti_min = ti->add_subcommand("min", "minimal tiling");
  ti_min->add_option("n", n)->required();
  ti_min->callback([&] { action = [&] { return Finished{io::tiling_json(min_tiling(n)), 0}; }; });
  auto* ti_max = ti->add_subcommand("max", "maximal tiling");
  ti_max->add_option("n", n)->required();
  ti_max->callback([&] { action = [&] { return Finished{io::tiling_json(max_tiling(n)), 0}; }; });
  auto* ti_flip = ti->add_subcommand("flip", "apply one flip, or list the flippable triples");
  needs_file(ti_flip);
  std::string triple_arg;
  ti_flip->add_option("--triple", triple_arg, "i,j,k");
  ti_flip->callback([&] {
    action = [&] {
      DiamondTiling t = io::tiling(load(file));
      if (triple_arg.empty()) {
        json fl = json::array();
        for (const auto& f : enumerate_flips(t))
          fl.push_back({{"triple", f.triple}, {"direction", f.dir == FlipDir::Up ? "up" : "down"}});
        return Finished{{{"flips", fl}}, 0};
      }
      auto v = parse_ints(triple_arg);
      if (v.size() != 3) throw Error(ErrorKind::InvalidInput, "--triple needs three indices");
      Triple tr{v[0], v[1], v[2]};
      std::sort(tr.begin(), tr.end());
      return Finished{io::tiling_json(apply_flip(t, tr)), 0};
    };
  });
  auto* ti_pile = ti->add_subcommand("pile", "validate a pile, or produce the lexicographic pile / all piles for n");
  std::string pile_file;
  int lex_n = 0, enum_n = 0;
  ti_pile->add_option("file", pile_file, "pile JSON");
  ti_pile->add_option("--lex", lex_n, "lexicographic pile for this n");
  ti_pile->add_option("--enumerate", enum_n, "every pile from the minimal to the maximal tiling (n <= 5)");
  ti_pile->callback([&] {
    action = [&]() -> Finished {
      if (lex_n) return {io::pile_json(lex_standard_pile(lex_n).pile), 0};
      if (enum_n) {
        json all = json::array();
        for (const auto& seq : enumerate_piles(enum_n)) all.push_back(seq);
        return {{{"n", enum_n}, {"count", all.size()}, {"piles", all}}, 0};
      }
      if (pile_file.empty()) throw Error(ErrorKind::InvalidInput, "tiling pile needs a file, --lex or --enumerate");
      Pile p = io::pile(load(pile_file));
      return {{{"length", p.flips.size()}, {"final", io::tiling_json(p.last())}}, 0};
    };
  });

  // complex ---------------------------------------------------------------
  auto* cx = app.add_subcommand("complex", "directed cubical complexes")->require_subcommand(1);
  auto* cx_build = cx->add_subcommand("build", "complex of a pile");
  std::string cx_pile;
  int cx_lex = 0;
  cx_build->add_option("file", cx_pile, "pile JSON");
  cx_build->add_option("--lex", cx_lex, "use the lexicographic pile for this n");
  cx_build->callback([&] {
    action = [&] {
      Pile p;
      if (cx_lex) p = lex_standard_pile(cx_lex).pile;
      else if (!cx_pile.empty()) p = io::pile(load(cx_pile));
      else throw Error(ErrorKind::InvalidInput, "complex build needs a pile file or --lex");
      return Finished{io::complex_json(build_complex(p)), 0};
    };
  });
  auto* cx_check = cx->add_subcommand("check", "Kashaev and coherence on a valued complex; K-hexahedron when face_values are given");
  needs_file(cx_check);
  cx_check->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto L = io::complex(in);
        auto x = io::complex_values<T>(in, L);
        Report<T> r = check_complex_kashaev(L.c, x, opt.tol(), opt.jobs);
        append(r, check_complex_coherence(L.c, x, opt.tol(), opt.jobs));
        if (in.contains("face_values")) append(r, check_complex_khex(L.c, x, io::complex_face_values<T>(in, L), opt.tol()));
        return verdict(std::move(r), m);
      });
    };
  });
  auto* cx_comf = cx->add_subcommand("comfortable", "image of psi against the interior parity space");
  needs_file(cx_comf);
  cx_comf->callback([&] {
    action = [&] {
      auto L = io::complex(load(file));
      Comfort c = is_comfortable(L.c);
      json doc{{"comfortable", c.comfortable}, {"dim_image_psi", c.dim_image_psi}, {"dim_c2", c.dim_c2}, {"image_in_c2", c.image_in_c2}};
      return Finished{doc, c.comfortable ? 0 : 1};
    };
  });
  auto* cx_ext = cx->add_subcommand("extend", "face values for a coherent valued complex");
  needs_file(cx_ext);
  cx_ext->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto L = io::complex(in);
        auto faces = extend_on_complex(L.c, io::complex_values<T>(in, L), opt.tol());
        json fv = json::array();
        for (const auto& f : faces) fv.push_back(io::emit(*f));
        json doc = in;
        doc["face_values"] = fv;
        return Finished{doc, 0};
      });
    };
  });

  // minors ----------------------------------------------------------------
  auto* mi = app.add_subcommand("minors", "signed principal minors")->require_subcommand(1);
  auto* mi_from = mi->add_subcommand("from-matrix", "signed minor tuple of a symmetric matrix");
  needs_file(mi_from);
  mi_from->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() { return Finished{io::tuple_json(signed_minor_tuple(io::matrix<T>(in))), 0}; });
    };
  });
  auto* mi_test = mi->add_subcommand("test", "realizability by a symmetric matrix");
  needs_file(mi_test);
  bool only_full = false;
  mi_test->add_flag("--full-set-only", only_full, "product identity for A = [n] only");
  mi_test->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto v = realizability_test(io::tuple<T>(in), opt.tol(), only_full);
        json doc{{"verdict", v.pass ? "PASS" : "FAIL"}, {"mode", io::mode_name(m)}};
        if (!v.pass) doc["certificate"] = v.certificate;
        return Finished{doc, v.pass ? 0 : 1};
      });
    };
  });
  auto* mi_rec = mi->add_subcommand("reconstruct", "symmetric matrix with the given tuple");
  needs_file(mi_rec);
  mi_rec->callback([&] {
    action = [&] {
      json in = load(file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() { return Finished{{{"matrix", io::matrix_json(reconstruct_symmetric(io::tuple<T>(in), opt.tol()))}}, 0}; });
    };
  });

  // genrec ----------------------------------------------------------------
  auto* ge = app.add_subcommand("genrec", "recurrences of the general framework")->require_subcommand(1);
  std::string inst_id, params_arg, grid_file;
  std::uint64_t seed = 1;
  int trials = 100;
  auto instance_opts = [&](CLI::App* c) {
    c->add_option("--instance", inst_id, "kashaev3d, sholo2d, cubic1d or box2d")->required();
    c->add_option("--params", params_arg, "comma-separated parameters");
  };
  auto* ge_run = ge->add_subcommand("run", "sweep from a grid's initial data, or from random positive data");
  instance_opts(ge_run);
  ge_run->add_option("file", grid_file, "grid JSON with initial data");
  ge_run->add_option("--seed", seed, "seed for random initial data");
  ge_run->callback([&] {
    action = [&] {
      json in = grid_file.empty() ? json() : load(grid_file);
      Mode m = grid_file.empty() && opt.mode != "exact" ? Mode::Float : pick_mode(opt, grid_file.empty() ? nullptr : &in);
      return dispatch(m, [&]<class T>() {
        auto inst = gen::make_instance<T>(inst_id, parse_params<T>(params_arg));
        gen::GridField<T> x;
        if (!grid_file.empty()) {
          x = io::grid<T>(in, inst.shape);
        } else {
          if constexpr (!std::is_same_v<T, double>) throw Error(ErrorKind::ModeMismatch, "random initial data is float only");
          std::mt19937_64 rng(seed);
          std::uniform_real_distribution<double> u(0.5, 2.0);
          x = gen::initial_field(inst, gen::default_window(inst.shape), [&] { return T(u(rng)); });
        }
        gen::gen_sweep(inst, x);
        return Finished{io::grid_json(x), 0};
      });
    };
  });
  auto* ge_ver = ge->add_subcommand("verify", "recurrence, face conditions and coherence on a grid");
  instance_opts(ge_ver);
  ge_ver->add_option("file", grid_file, "grid JSON")->required();
  ge_ver->callback([&] {
    action = [&] {
      json in = load(grid_file);
      Mode m = pick_mode(opt, &in);
      return dispatch(m, [&]<class T>() {
        auto inst = gen::make_instance<T>(inst_id, parse_params<T>(params_arg));
        auto x = io::grid<T>(in, inst.shape);
        Report<T> r = gen::check_gen(inst, x, opt.tol());
        append(r, gen::check_gen_coherence_all(inst, x, opt.tol()));
        return verdict(std::move(r), m);
      });
    };
  });
  auto* ge_sig = ge->add_subcommand("signs", "observed propagation signs against the instance table");
  instance_opts(ge_sig);
  ge_sig->add_option("--trials", trials, "random sweeps")->check(CLI::Range(1, 100000));
  ge_sig->add_option("--seed", seed, "random seed");
  ge_sig->callback([&] {
    action = [&] {
      auto inst = gen::make_instance<double>(inst_id, parse_params<double>(params_arg));
      std::mt19937_64 rng(seed);
      auto sv = gen::verify_propagation_signs(inst, trials, rng, opt.tol());
      json doc{{"instance", inst_id}, {"table", inst.gamma}, {"observed", sv.observed}, {"mismatches", sv.mismatches}, {"samples", sv.samples}};
      return Finished{doc, sv.mismatches.empty() ? 0 : 1};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto t0 = std::chrono::steady_clock::now();
    Finished r = action();
    if (opt.timing && r.doc.is_object())
      r.doc["timing"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(opt, r.doc);
    return r.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: InvalidInput: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
