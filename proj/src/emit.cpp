#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "raas/harness.hpp"

namespace raas {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

EmitOptions parse_formats(const std::string& formats) {
  EmitOptions o;
  o.csv = false;
  o.svg = false;
  std::stringstream ss(formats);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "csv") o.csv = true;
    else if (item == "svg") o.svg = true;
    else if (!item.empty()) throw ConfigError("unknown output format '" + item + "'");
  }
  return o;
}

std::string trial_csv_header() {
  return "t,accepted,gamma_hat,gamma,alpha_hat,alpha,rho_hat,beta_hat,gamma_aux,"
         "W,D,e_x,e_y,e_xp,eps_f,eps_g,theta,vartheta,step_norm,g_norm,"
         "gap,gap_y,grad_norm_y,Phi,Phi_next";
}

std::string trial_csv_row(const TrialRecord& r) {
  const double v[] = {r.gamma_hat, r.gamma, r.alpha_hat, r.alpha, r.rho_hat,
                      r.beta_hat,  r.gamma_aux, r.W, r.D, r.e_x, r.e_y, r.e_xp,
                      r.eps_f, r.eps_g, r.theta, r.vartheta, r.step_norm, r.g_norm,
                      r.gap, r.gap_y, r.grad_norm_y, r.Phi, r.Phi_next};
  std::string s = std::to_string(r.t) + (r.accepted ? ",1" : ",0");
  for (double x : v) {
    s += ',';
    s += format_double(x);
  }
  return s;
}

namespace {

std::string slug(const std::string& name) {
  std::string s;
  for (char ch : name) {
    unsigned char c = static_cast<unsigned char>(ch);
    s += std::isalnum(c) ? char(std::tolower(c)) : '_';
  }
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

// Mean gap per method on a log axis.
std::string render_svg(const ExperimentResult& res) {
  const double W = 720, H = 440, ml = 70, mr = 160, mt = 20, mb = 50;
  double lo = INFINITY, hi = -INFINITY;
  std::size_t n = 0;
  for (const auto& m : res.methods)
    for (double v : m.series.mean)
      if (v > 0 && std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        n = std::max(n, m.series.mean.size());
      }
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (n == 0) {
    s << "</svg>\n";
    return s.str();
  }
  double llo = std::floor(std::log10(lo)), lhi = std::ceil(std::log10(hi));
  if (lhi <= llo) lhi = llo + 1;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto X = [&](double i) { return ml + pw * i / std::max<double>(1, double(n - 1)); };
  auto Y = [&](double v) { return mt + ph * (lhi - std::log10(v)) / (lhi - llo); };
  s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = llo; e <= lhi; e += 1) {
    s << "<line x1=\"" << ml << "\" x2=\"" << ml + pw << "\" y1=\"" << Y(std::pow(10, e))
      << "\" y2=\"" << Y(std::pow(10, e)) << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << ml - 6 << "\" y=\"" << Y(std::pow(10, e)) + 4
      << "\" text-anchor=\"end\">1e" << int(e) << "</text>\n";
  }
  s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\">iteration</text>\n";
  s << "<text x=\"" << ml << "\" y=\"" << H - 30 << "\" text-anchor=\"middle\">1</text>\n";
  s << "<text x=\"" << ml + pw << "\" y=\"" << H - 30 << "\" text-anchor=\"middle\">" << n
    << "</text>\n";
  std::size_t k = 0;
  for (const auto& m : res.methods) {
    const char* col = kPalette[k % 8];
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < m.series.mean.size(); ++i) {
      double v = m.series.mean[i];
      if (!(v > 0) || !std::isfinite(v)) continue;
      s << format_double(X(double(i))) << ',' << format_double(Y(v)) << ' ';
    }
    s << "\"/>\n";
    const double ly = mt + 16 * double(k) + 10;
    s << "<line x1=\"" << ml + pw + 10 << "\" x2=\"" << ml + pw + 30 << "\" y1=\"" << ly
      << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << ml + pw + 36 << "\" y=\"" << ly + 4 << "\">" << m.config.name
      << "</text>\n";
    ++k;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::vector<std::string> emit(const ExperimentResult& res, const std::string& out_dir,
                              const EmitOptions& opt) {
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  std::vector<std::string> files;
  nlohmann::ordered_json manifest;
  char cfp[20];
  std::snprintf(cfp, sizeof cfp, "%016llx",
                static_cast<unsigned long long>(fingerprint(res.canonical, "", 0)));
  manifest["config_fingerprint"] = cfp;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();

  if (opt.csv) {
    fs::create_directories(root / "runs", ec);
    fs::create_directories(root / "aggregate", ec);
    if (ec) throw IoError("cannot create output subdirectories under '" + out_dir + "'");
  }
  for (const MethodResult& m : res.methods) {
    const std::string base = slug(m.config.name);
    for (std::size_t si = 0; si < res.seeds.size(); ++si) {
      char fp[20];
      std::snprintf(fp, sizeof fp, "%016llx",
                    static_cast<unsigned long long>(
                        fingerprint(res.canonical, m.config.name, res.seeds[si])));
      if (!m.failures[si].empty()) {
        failures.push_back({{"method", m.config.name}, {"seed", res.seeds[si]},
                            {"error", m.failures[si]}});
        continue;
      }
      const RunTrace& tr = *m.traces[si];
      nlohmann::ordered_json run{{"method", m.config.name}, {"seed", res.seeds[si]},
                                 {"fingerprint", fp}, {"trials", tr.records.size()}};
      if (tr.t_eps) run["t_eps"] = *tr.t_eps;
      if (opt.csv) {
        std::string rel = "runs/" + base + "_seed" + std::to_string(res.seeds[si]) + ".csv";
        std::string body = trial_csv_header() + "\n";
        for (const TrialRecord& r : tr.records) body += trial_csv_row(r) + "\n";
        write_file(root / rel, body);
        files.push_back(rel);
        run["csv"] = rel;
      }
      runs.push_back(run);
    }
    if (opt.csv) {
      std::string rel = "aggregate/" + base + ".csv";
      std::string body = "t,mean_gap,std_gap\n";
      for (std::size_t i = 0; i < m.series.mean.size(); ++i)
        body += std::to_string(i + 1) + "," + format_double(m.series.mean[i]) + "," +
                format_double(m.series.stdev[i]) + "\n";
      write_file(root / rel, body);
      files.push_back(rel);
    }
  }
  if (opt.svg) {
    write_file(root / "gap.svg", render_svg(res));
    files.push_back("gap.svg");
  }
  if (!failures.empty()) {
    write_file(root / "failures.json", failures.dump(2) + "\n");
    files.push_back("failures.json");
  }
  manifest["runs"] = runs;
  manifest["files"] = files;
  write_file(root / "manifest.json", manifest.dump(2) + "\n");
  files.push_back("manifest.json");
  return files;
}

}  // namespace raas
