#include "cli_util.hpp"

#include <cstdlib>
#include <map>

namespace cli {

using dg::cplx;

LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DIRAC_GREEN_LOG");
    if (!env) return LogLevel::Warn;
    const std::string s(env);
    if (s == "error") return LogLevel::Error;
    if (s == "warn") return LogLevel::Warn;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& msg) {
  if (level > log_threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "dirac-green[%s] %s\n", names[static_cast<int>(level)],
               msg.c_str());
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty()) throw ConfigError("--set: empty key in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const json& cfg) {
  // Runtime knobs (worker count, output routing) cannot change any computed
  // number, so they stay outside the hash.
  json canon = cfg;
  canon.erase("threads");
  canon.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon.dump())));
  return buf;
}

namespace {

cplx amplitude_from(const json& j, bool allow_imag) {
  const double re = j.value("amplitude", 0.0);
  const double im = j.value("amplitude_im", 0.0);
  if (im != 0.0 && !allow_imag) {
    throw ConfigError("potential: V components must be real (amplitude_im)");
  }
  return {re, im};
}

dg::PotentialComponent component_from(const json& j, bool allow_imag,
                                      std::uint64_t default_seed) {
  if (j.is_null()) return dg::PotentialComponent::zero();
  const std::string family = j.value("family", "zero");
  const double power = j.value("power", 1.0);
  const long center = j.value("center", 0L);
  if (family == "zero") return dg::PotentialComponent::zero();
  if (family == "power") {
    return dg::PotentialComponent::power(amplitude_from(j, allow_imag), power,
                                         center);
  }
  if (family == "oscillating") {
    return dg::PotentialComponent::oscillating(amplitude_from(j, allow_imag),
                                               power, center);
  }
  if (family == "periodic_decay") {
    if (!j.contains("pattern") || !j["pattern"].is_array()) {
      throw ConfigError("periodic_decay: 'pattern' array required");
    }
    std::vector<cplx> pattern;
    for (const auto& v : j["pattern"]) pattern.emplace_back(v.get<double>());
    return dg::PotentialComponent::periodic_decay(
        std::move(pattern), amplitude_from(j, allow_imag), power, center);
  }
  if (family == "bump_table") {
    if (!j.contains("entries") || !j["entries"].is_object()) {
      throw ConfigError("bump_table: 'entries' object required");
    }
    std::map<long, cplx> entries;
    for (const auto& [key, v] : j["entries"].items()) {
      cplx val;
      if (v.is_array()) {
        if (!allow_imag && v.size() > 1 && v[1].get<double>() != 0.0) {
          throw ConfigError("bump_table: V entries must be real");
        }
        val = cplx(v[0].get<double>(), v.size() > 1 ? v[1].get<double>() : 0.0);
      } else {
        val = cplx(v.get<double>());
      }
      entries[std::stol(key)] = val;
    }
    return dg::PotentialComponent::bump_table(std::move(entries));
  }
  if (family == "iid_uniform") {
    const double amp = j.value("amplitude", 0.0);
    const std::uint64_t seed = j.value("seed", default_seed);
    const bool complex_part = allow_imag && j.value("complex", false);
    return dg::PotentialComponent::iid_uniform(amp, seed, complex_part);
  }
  throw ConfigError("unknown potential family '" + family + "'");
}

}  // namespace

dg::OperatorSpec spec_from_config(const json& cfg) {
  if (!cfg.contains("operator")) throw ConfigError("config: 'operator' missing");
  const json& op = cfg["operator"];
  dg::OperatorSpec spec;

  const std::string mode = op.value("mode", "dirac");
  if (mode == "dirac") {
    spec.mode = dg::Mode::Dirac;
  } else if (mode == "jacobi") {
    spec.mode = dg::Mode::Jacobi;
  } else {
    throw ConfigError("operator.mode must be 'dirac' or 'jacobi'");
  }

  spec.m = op.value("mass", 0.0);
  if (spec.m < 0.0) throw ConfigError("operator.mass must be >= 0");

  if (op.contains("lattice")) {
    const json& lat = op["lattice"];
    if (lat.is_string()) {
      const std::string kind = lat.get<std::string>();
      if (kind == "full_line") {
        spec.lattice = dg::Lattice::full_line();
      } else if (kind == "half_line") {
        spec.lattice = dg::Lattice::half_line(0);
      } else {
        throw ConfigError("operator.lattice must be half_line or full_line");
      }
    } else {
      const std::string kind = lat.value("kind", "half_line");
      if (kind == "full_line") {
        spec.lattice = dg::Lattice::full_line();
      } else if (kind == "half_line") {
        spec.lattice = dg::Lattice::half_line(lat.value("start", 0L));
      } else {
        throw ConfigError("operator.lattice.kind must be half_line or full_line");
      }
    }
  }

  spec.nu1 = op.value("nu1", 1);
  spec.nu2 = op.value("nu2", 1);
  if (spec.nu1 < 1 || spec.nu2 < 1) throw ConfigError("nu1, nu2 must be >= 1");

  const std::uint64_t seed = cfg.value("rng_seed", 12345ull);
  if (op.contains("potential")) {
    const json& pot = op["potential"];
    if (spec.mode == dg::Mode::Jacobi) {
      const char* key = pot.contains("v") ? "v" : "v1";
      if (pot.contains(key)) {
        spec.pot.v1 = component_from(pot[key], false, seed);
      }
    } else {
      if (pot.contains("v1")) spec.pot.v1 = component_from(pot["v1"], false, seed);
      if (pot.contains("v2")) spec.pot.v2 = component_from(pot["v2"], false, seed);
      if (pot.contains("w1")) spec.pot.w1 = component_from(pot["w1"], true, seed ^ 1);
      if (pot.contains("w2")) spec.pot.w2 = component_from(pot["w2"], true, seed ^ 2);
    }
  }
  return spec;
}

dg::GreenOptions green_options(const json& section, const json& root) {
  dg::GreenOptions o;
  o.tol = section.value("tol", o.tol);
  o.max_depth = section.value("max_depth", o.max_depth);
  o.block = section.value("block", 0);
  const std::string seed = section.value("seed", "periodic");
  if (seed == "periodic") {
    o.seed = dg::SeedStrategy::periodic(section.value("seed_nu", 0));
  } else if (seed == "i" || seed == "imaginary_unit") {
    o.seed = dg::SeedStrategy::imaginary_unit();
  } else {
    throw ConfigError("seed must be 'periodic' or 'i'");
  }
  o.kernel = root.value("kernel", "");
  if (o.kernel == "auto") o.kernel.clear();
  if (!(o.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (o.max_depth < 1) throw ConfigError("max_depth must be >= 1");
  return o;
}

dg::Window window_from_config(const json& section) {
  dg::Window w;
  if (!section.contains("x1") || !section.contains("x2")) {
    throw ConfigError("window: x1 and x2 required");
  }
  w.x1 = section["x1"].get<double>();
  w.x2 = section["x2"].get<double>();
  w.x_count = section.value("x_count", 100);
  if (section.contains("eps")) {
    if (section["eps"].is_array()) {
      for (const auto& e : section["eps"]) w.eps.push_back(e.get<double>());
    } else {
      w.eps.push_back(section["eps"].get<double>());
    }
  }
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return w;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::string& hash) {
  out_.open(path, std::ios::binary);
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  out_ << "# config_hash=" << hash << " version=" << kVersion << "\n";
}

void CsvWriter::header(const std::string& columns) { out_ << columns << "\n"; }

void CsvWriter::field(const std::string& s) {
  if (!first_in_row_) out_ << ",";
  out_ << s;
  first_in_row_ = false;
}

void CsvWriter::field(double v) { field(fmt17(v)); }

void CsvWriter::endrow() {
  out_ << "\n";
  first_in_row_ = true;
}

CsvWriter::~CsvWriter() = default;

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << j.dump(2) << "\n";
}

void emit_plot_script(const std::filesystem::path& dir) {
  const char* script = R"PY(#!/usr/bin/env python3
"""Plot scan.csv / density.csv produced by dirac-green."""
import csv
import sys

import matplotlib.pyplot as plt


def read_rows(path):
    with open(path) as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, data = rows[0], rows[1:]
    return header, data


def main(path):
    header, data = read_rows(path)
    if header[:2] == ["x", "eps"]:
        by_eps = {}
        for row in data:
            by_eps.setdefault(float(row[1]), []).append((float(row[0]), float(row[2])))
        for eps, pts in sorted(by_eps.items(), reverse=True):
            pts.sort()
            plt.plot([p[0] for p in pts], [p[1] for p in pts], label=f"eps={eps:g}")
        plt.ylabel("|G|")
    else:
        cols = list(zip(*[[float(v) for v in row] for row in data]))
        for name, col in list(zip(header, cols))[1:]:
            plt.plot(cols[0], col, label=name)
    plt.xlabel("x")
    plt.legend()
    plt.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    plt.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "scan.csv")
)PY";
  std::ofstream out(dir / "plot_scan.py", std::ios::binary);
  out << script;
}

}  // namespace cli
