#include "simprof/problem.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace simprof {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// Flat key-value view of an INI document: "section.key" -> value, with
/// duplicate detection and insertion order kept for error reporting.
struct IniDoc {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::string> errors;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries)
      if (k == key) {
        v = value;
        return;
      }
    entries.emplace_back(key, value);
  }
};

IniDoc parse_ini(const std::string& text) {
  IniDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        doc.errors.push_back("line " + std::to_string(lineno) + ": malformed section header '" +
                             t + "'");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        doc.errors.push_back("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      doc.errors.push_back("line " + std::to_string(lineno) + ": expected key = value, got '" +
                           t + "'");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      doc.errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (section.empty()) {
      doc.errors.push_back("line " + std::to_string(lineno) + ": key '" + key +
                           "' outside any section");
      continue;
    }
    std::string full = section + "." + key;
    if (doc.find(full))
      doc.errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
    else
      doc.entries.emplace_back(full, value);
  }
  return doc;
}

bool parse_double(const std::string& s, double* out) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail()) return false;
  std::string rest;
  in >> rest;
  if (!rest.empty()) return false;
  *out = v;
  return true;
}

bool parse_int(const std::string& s, int* out) {
  double v = 0.0;
  if (!parse_double(s, &v)) return false;
  if (v != std::floor(v) || std::abs(v) > 1e9) return false;
  *out = static_cast<int>(v);
  return true;
}

bool parse_vector(const std::string& s, VectorXd* out) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  in.imbue(std::locale::classic());
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  std::string rest;
  in.clear();
  in >> rest;
  if (!rest.empty() || vals.empty()) return false;
  *out = Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return true;
}

/// Splits "base(args)" into its parts; plain names have empty args.
void split_name(const std::string& s, std::string* base, std::string* args) {
  size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')') {
    *base = s;
    args->clear();
    return;
  }
  *base = trim(s.substr(0, open));
  *args = trim(s.substr(open + 1, s.size() - open - 2));
}

/// Accepts "2", "m=2", "d=0.5" argument spellings.
bool parse_name_param(const std::string& args, double* out) {
  size_t eq = args.find('=');
  return parse_double(eq == std::string::npos ? args : trim(args.substr(eq + 1)), out);
}

// A reaction line: "a1 a2 .. -> b1 b2 .. @ k"
bool parse_reaction(const std::string& s, int species, Reaction* out) {
  size_t arrow = s.find("->");
  if (arrow == std::string::npos) return false;
  std::string lhs = trim(s.substr(0, arrow));
  std::string rest = s.substr(arrow + 2);
  size_t at = rest.find('@');
  std::string rhs = trim(at == std::string::npos ? rest : rest.substr(0, at));
  double k = 1.0;
  if (at != std::string::npos && !parse_double(trim(rest.substr(at + 1)), &k)) return false;
  VectorXd a, b;
  if (!parse_vector(lhs, &a) || !parse_vector(rhs, &b)) return false;
  if (a.size() != species || b.size() != species) return false;
  out->alpha = a.cast<int>();
  out->beta = b.cast<int>();
  if ((out->alpha.cast<double>() - a).norm() > 0 || (out->beta.cast<double>() - b).norm() > 0)
    return false;  // non-integer stoichiometry
  out->k = k;
  return true;
}

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"diffusivity", {"name"}},
    {"fluxmap", {"name", "matrix", "d", "box_lo", "box_hi"}},
    {"network", {"species", "w", "d", "box_lo", "box_hi"}},  // plus reaction_<i>
    {"boundary", {"U_minus", "U_plus", "C_minus", "C_plus"}},
    {"grid", {"L", "n_points"}},
    {"solver",
     {"eps_schedule", "shoot_tol", "newton_tol", "newton_max_iter", "damping", "initial_noise"}},
    {"evolution",
     {"tau_end", "record_stride", "bump_amplitude", "bump_center", "bump_width", "fit_tau_min"}},
    {"verify", {"profile"}},
};

bool key_known(const std::string& full) {
  size_t dot = full.find('.');
  std::string section = full.substr(0, dot);
  std::string key = full.substr(dot + 1);
  auto it = kKnownKeys.find(section);
  if (it == kKnownKeys.end()) return false;
  for (const auto& k : it->second)
    if (k == key) return true;
  return section == "network" && key.rfind("reaction_", 0) == 0;
}

void parse_network_entries(const IniDoc& doc, ProblemDescription* d,
                           std::vector<std::string>* errors) {
  const std::string* species = doc.find("network.species");
  if (!species) {
    errors->push_back("network.species: missing");
    return;
  }
  int ns = 0;
  if (!parse_int(*species, &ns) || ns <= 0) {
    errors->push_back("network.species: must be a positive integer, got '" + *species + "'");
    return;
  }
  ReactionNetwork net;
  net.species_count = ns;
  net.w = VectorXd::Ones(ns);
  if (const std::string* w = doc.find("network.w")) {
    if (!parse_vector(*w, &net.w) || net.w.size() != ns || net.w.minCoeff() <= 0.0)
      errors->push_back("network.w: expected " + std::to_string(ns) + " positive reals");
  }
  for (int r = 1;; ++r) {
    const std::string* line = doc.find("network.reaction_" + std::to_string(r));
    if (!line) break;
    Reaction reaction;
    if (!parse_reaction(*line, ns, &reaction))
      errors->push_back("network.reaction_" + std::to_string(r) +
                        ": expected 'a_1 .. a_s -> b_1 .. b_s @ k' with integer coefficients");
    else
      net.reactions.push_back(reaction);
  }
  if (const std::string* dd = doc.find("network.d")) {
    VectorXd v;
    if (!parse_vector(*dd, &v) || v.size() != ns || v.minCoeff() <= 0.0)
      errors->push_back("network.d: expected " + std::to_string(ns) + " positive diffusivities");
    else
      d->d_diag = v;
  }
  d->network = net;
  d->has_network = true;
}

void parse_box(const IniDoc& doc, const std::string& section, ProblemDescription* d,
               std::vector<std::string>* errors) {
  const std::string* lo = doc.find(section + ".box_lo");
  const std::string* hi = doc.find(section + ".box_hi");
  if (!lo && !hi) return;
  if (!lo || !hi) {
    errors->push_back(section + ".box_lo/box_hi: both are required when either is given");
    return;
  }
  VectorXd vlo, vhi;
  if (!parse_vector(*lo, &vlo) || !parse_vector(*hi, &vhi) || vlo.size() != vhi.size() ||
      (vhi - vlo).minCoeff() <= 0.0) {
    errors->push_back(section + ".box_lo/box_hi: expected equal-length vectors with lo < hi");
    return;
  }
  d->box_lo = vlo;
  d->box_hi = vhi;
  d->has_box = true;
}

ParseResult parse_document(IniDoc doc, const std::string& base_dir,
                           const std::vector<std::string>& overrides) {
  ParseResult result;
  ProblemDescription& d = result.description;
  std::vector<std::string>& errors = result.errors;
  errors = doc.errors;

  for (const std::string& ov : overrides) {
    size_t eq = ov.find('=');
    size_t dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      errors.push_back("override '" + ov + "': expected section.key=value");
      continue;
    }
    doc.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }

  for (const auto& [key, value] : doc.entries) {
    (void)value;
    if (!key_known(key)) errors.push_back(key + ": unknown key");
  }

  auto get_double = [&](const std::string& key, double* out) {
    const std::string* s = doc.find(key);
    if (!s) return false;
    if (!parse_double(*s, out) || !std::isfinite(*out)) {
      errors.push_back(key + ": expected a finite real, got '" + *s + "'");
      return false;
    }
    return true;
  };
  auto get_int = [&](const std::string& key, int* out) {
    const std::string* s = doc.find(key);
    if (!s) return false;
    if (!parse_int(*s, out)) {
      errors.push_back(key + ": expected an integer, got '" + *s + "'");
      return false;
    }
    return true;
  };
  auto get_vec = [&](const std::string& key, VectorXd* out) {
    const std::string* s = doc.find(key);
    if (!s) return false;
    if (!parse_vector(*s, out)) {
      errors.push_back(key + ": expected a list of reals, got '" + *s + "'");
      return false;
    }
    return true;
  };

  // [diffusivity]
  if (const std::string* name = doc.find("diffusivity.name")) {
    std::string base, args;
    split_name(*name, &base, &args);
    static const std::vector<std::string> known = {"linear",   "pme",      "degen_I",
                                                   "degen_II", "degen_III", "gl_phase"};
    if (std::find(known.begin(), known.end(), base) == known.end()) {
      errors.push_back("diffusivity.name: unknown diffusivity '" + base + "'");
    } else {
      d.diffusivity_name = base;
      d.has_diffusivity = true;
      if (!args.empty()) {
        if (!parse_name_param(args, &d.diffusivity_param))
          errors.push_back("diffusivity.name: bad parameter '" + args + "'");
      } else if (base == "pme") {
        errors.push_back("diffusivity.name: pme requires an exponent, e.g. pme(m=2)");
      }
      if (base == "pme" && d.diffusivity_param < 1.0)
        errors.push_back("diffusivity.name: pme exponent must be >= 1");
    }
  }

  // [fluxmap]
  if (const std::string* name = doc.find("fluxmap.name")) {
    std::string base, args;
    split_name(*name, &base, &args);
    if (base == "linear") {
      const std::string* mat = doc.find("fluxmap.matrix");
      if (!mat) {
        errors.push_back("fluxmap.matrix: required for the linear flux map");
      } else {
        std::vector<VectorXd> rows;
        std::istringstream in(*mat);
        std::string row;
        bool ok = true;
        while (std::getline(in, row, ';')) {
          VectorXd r;
          if (!parse_vector(row, &r) || (!rows.empty() && r.size() != rows.front().size()))
            ok = false;
          else
            rows.push_back(r);
        }
        if (!ok || rows.empty() ||
            static_cast<Eigen::Index>(rows.size()) != rows.front().size()) {
          errors.push_back("fluxmap.matrix: expected a square matrix, rows separated by ';'");
        } else {
          d.fluxmap_matrix.resize(static_cast<Eigen::Index>(rows.size()), rows.front().size());
          for (size_t i = 0; i < rows.size(); ++i)
            d.fluxmap_matrix.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
          d.has_fluxmap = true;
        }
      }
    } else if (base == "reduced") {
      if (args.empty()) {
        errors.push_back("fluxmap.name: reduced requires a network file, e.g. reduced(net.ini)");
      } else {
        std::filesystem::path p(args);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) {
          errors.push_back("fluxmap.name: network file '" + args + "' not found");
        } else {
          std::stringstream buf;
          buf << in.rdbuf();
          IniDoc netdoc = parse_ini(buf.str());
          for (const auto& e : netdoc.errors) errors.push_back(args + ": " + e);
          for (const auto& [k, v] : netdoc.entries) {
            (void)v;
            if (!key_known(k) || k.rfind("network.", 0) != 0)
              errors.push_back(args + ": " + k + ": unknown key");
          }
          parse_network_entries(netdoc, &d, &errors);
          parse_box(netdoc, "network", &d, &errors);
          d.fluxmap_reduced = true;
          d.has_fluxmap = true;
        }
      }
    } else {
      errors.push_back("fluxmap.name: unknown flux map '" + base + "'");
    }
    if (const std::string* dd = doc.find("fluxmap.d")) {
      VectorXd v;
      if (!parse_vector(*dd, &v) || v.minCoeff() <= 0.0)
        errors.push_back("fluxmap.d: expected positive diffusivities");
      else
        d.d_diag = v;
    }
    parse_box(doc, "fluxmap", &d, &errors);
  }

  // inline [network]
  if (doc.find("network.species")) {
    parse_network_entries(doc, &d, &errors);
    parse_box(doc, "network", &d, &errors);
  }
  if (d.has_network) {
    try {
      d.network.validate();
    } catch (const std::exception& e) {
      errors.push_back(std::string("network: ") + e.what());
    }
    if (d.d_diag.size() != 0 && d.d_diag.size() != d.network.species_count)
      errors.push_back("network.d: dimension does not match species count");
  }

  // [boundary]
  VectorXd um, up;
  bool has_um = get_vec("boundary.U_minus", &um);
  bool has_up = get_vec("boundary.U_plus", &up);
  if (has_um != has_up) {
    errors.push_back("boundary: U_minus and U_plus must be given together");
  } else if (has_um) {
    if (um.size() != up.size()) {
      errors.push_back("boundary: U_minus and U_plus have different dimensions");
    } else {
      d.U_minus = um;
      d.U_plus = up;
      d.has_boundary = true;
    }
  }
  VectorXd cm, cp;
  bool has_cm = get_vec("boundary.C_minus", &cm);
  bool has_cp = get_vec("boundary.C_plus", &cp);
  if (has_cm != has_cp) {
    errors.push_back("boundary: C_minus and C_plus must be given together");
  } else if (has_cm) {
    if (cm.size() != cp.size() || cm.minCoeff() < 0.0 || cp.minCoeff() < 0.0) {
      errors.push_back("boundary: C_minus/C_plus must be nonnegative and of equal dimension");
    } else {
      d.C_minus = cm;
      d.C_plus = cp;
      d.has_c_boundary = true;
    }
  }

  // [grid]
  {
    double L = 0.0;
    int n = 0;
    bool hasL = get_double("grid.L", &L);
    bool hasN = get_int("grid.n_points", &n);
    if (hasL || hasN) {
      if (!hasL || !hasN) {
        errors.push_back("grid: L and n_points must be given together");
      } else {
        if (L <= 0.0) errors.push_back("grid.L: must be positive");
        if (n < 3 || n % 2 == 0) errors.push_back("grid.n_points: must be odd and >= 3");
        if (L > 0.0 && n >= 3 && n % 2 == 1) {
          d.half_width = L;
          d.n_points = n;
          d.has_grid = true;
        }
      }
    }
  }

  // [solver]
  if (const std::string* s = doc.find("solver.eps_schedule")) {
    VectorXd v;
    if (!parse_vector(*s, &v))
      errors.push_back("solver.eps_schedule: expected a list of reals");
    else
      d.eps_schedule.assign(v.data(), v.data() + v.size());
  }
  get_double("solver.shoot_tol", &d.shoot_tol);
  get_double("solver.newton_tol", &d.newton_tol);
  get_int("solver.newton_max_iter", &d.newton_max_iter);
  get_double("solver.damping", &d.damping);
  get_double("solver.initial_noise", &d.initial_noise);
  if (d.shoot_tol <= 0.0) errors.push_back("solver.shoot_tol: must be positive");
  if (d.newton_tol <= 0.0) errors.push_back("solver.newton_tol: must be positive");
  if (d.newton_max_iter <= 0) errors.push_back("solver.newton_max_iter: must be positive");
  if (!(d.damping > 0.0 && d.damping < 1.0))
    errors.push_back("solver.damping: must lie strictly between 0 and 1");

  // [evolution]
  {
    bool any = false;
    any |= get_double("evolution.tau_end", &d.tau_end);
    any |= get_int("evolution.record_stride", &d.record_stride);
    any |= get_double("evolution.bump_amplitude", &d.bump_amplitude);
    any |= get_double("evolution.bump_center", &d.bump_center);
    any |= get_double("evolution.bump_width", &d.bump_width);
    any |= get_double("evolution.fit_tau_min", &d.fit_tau_min);
    d.has_evolution = any;
    if (d.tau_end <= 0.0) errors.push_back("evolution.tau_end: must be positive");
    if (d.record_stride <= 0) errors.push_back("evolution.record_stride: must be positive");
    if (d.bump_width <= 0.0) errors.push_back("evolution.bump_width: must be positive");
  }

  // [verify]
  if (const std::string* s = doc.find("verify.profile")) {
    std::filesystem::path p(*s);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    d.profile_csv = p.string();
  }

  return result;
}

}  // namespace

Command command_from_string(const std::string& name) {
  if (name == "profile-scalar") return Command::ProfileScalar;
  if (name == "profile-vector") return Command::ProfileVector;
  if (name == "reduce") return Command::Reduce;
  if (name == "lift") return Command::Lift;
  if (name == "evolve") return Command::Evolve;
  if (name == "verify") return Command::Verify;
  if (name == "oracle") return Command::Oracle;
  throw std::invalid_argument("unknown command: " + name);
}

std::string command_to_string(Command command) {
  switch (command) {
    case Command::ProfileScalar: return "profile-scalar";
    case Command::ProfileVector: return "profile-vector";
    case Command::Reduce: return "reduce";
    case Command::Lift: return "lift";
    case Command::Evolve: return "evolve";
    case Command::Verify: return "verify";
    case Command::Oracle: return "oracle";
  }
  return "?";
}

ParseResult parse_problem(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back("problem file '" + path + "' not found");
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str(), std::filesystem::path(path).parent_path().string(),
                            overrides);
}

ParseResult parse_problem_text(const std::string& text, const std::string& base_dir,
                               const std::vector<std::string>& overrides) {
  return parse_document(parse_ini(text), base_dir.empty() ? "." : base_dir, overrides);
}

std::vector<std::string> validate_for_command(const ProblemDescription& d, Command command) {
  std::vector<std::string> errors;
  auto need_scalar_boundary = [&]() {
    if (!d.has_boundary)
      errors.push_back("[boundary] with U_minus/U_plus is required");
    else if (d.U_minus.size() != 1)
      errors.push_back("boundary: scalar commands need one-dimensional limits");
  };
  switch (command) {
    case Command::ProfileScalar:
    case Command::Oracle:
      if (!d.has_diffusivity) errors.push_back("[diffusivity] is required");
      if (command == Command::ProfileScalar) need_scalar_boundary();
      break;
    case Command::ProfileVector:
      if (!d.has_fluxmap) errors.push_back("[fluxmap] is required");
      if (!d.has_boundary) errors.push_back("[boundary] with U_minus/U_plus is required");
      if (d.has_fluxmap && !d.fluxmap_reduced && d.has_boundary &&
          d.U_minus.size() != d.fluxmap_matrix.rows())
        errors.push_back("boundary dimension does not match the flux map");
      if (d.fluxmap_reduced && d.d_diag.size() == 0)
        errors.push_back("fluxmap.d (or network.d): diffusivities are required");
      break;
    case Command::Reduce:
      if (!d.has_network) errors.push_back("[network] is required");
      break;
    case Command::Lift:
      if (!d.has_network) errors.push_back("[network] (or a reduced fluxmap) is required");
      if (d.d_diag.size() == 0) errors.push_back("network.d: diffusivities are required");
      if (!d.has_c_boundary)
        errors.push_back("[boundary] with C_minus/C_plus is required for lift");
      else if (d.has_network && d.C_minus.size() != d.network.species_count)
        errors.push_back("boundary: C_minus/C_plus dimension does not match species count");
      break;
    case Command::Evolve:
      if (!d.has_diffusivity)
        errors.push_back("[diffusivity] is required");
      else if (d.diffusivity_name != "linear" && d.diffusivity_name != "pme")
        errors.push_back("evolve supports the linear and pme diffusivities only");
      need_scalar_boundary();
      if (d.has_boundary && d.U_minus.size() == 1 && !(d.U_minus(0) > 0.0))
        errors.push_back("boundary.U_minus: relative entropy needs a positive lower limit");
      break;
    case Command::Verify:
      if (d.profile_csv.empty()) errors.push_back("[verify] profile = <csv path> is required");
      if (!d.has_diffusivity && !d.has_fluxmap)
        errors.push_back("verify needs a [diffusivity] or [fluxmap] to check against");
      if (!d.has_boundary) errors.push_back("[boundary] with U_minus/U_plus is required");
      break;
  }
  return errors;
}

}  // namespace simprof
