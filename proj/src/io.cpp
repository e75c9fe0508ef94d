#include "kalg/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kalg {

namespace {

constexpr char kKernelMagic[9] = "KALGKNL1";
constexpr const char* kLayout = "row-major x then w then d×d entries";

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little)
    throw std::runtime_error("kernel container requires a little-endian host");
}

void write_doubles(std::ostream& os, const double* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::istream& is, double* data, std::size_t count) {
  is.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("kernel container: truncated payload");
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string kernel_header_json(const Kernel& k) {
  std::ostringstream os;
  os << "{\"A\":" << format_double(k.grid.A) << ",\"N\":" << k.grid.N
     << ",\"W_half\":" << k.w_half << ",\"c\":" << k.grid.c
     << ",\"d\":" << k.grid.d << ",\"endianness\":\"little\""
     << ",\"has_beta\":" << (k.beta ? "true" : "false") << ",\"layout\":\""
     << json_escape(kLayout) << "\"}";
  return os.str();
}

}  // namespace

std::string kernel_content_id(const Kernel& k) {
  std::ostringstream os;
  os << kernel_header_json(k) << '\n';
  write_doubles(os, k.samples.data(), k.samples.size());
  if (k.beta) {
    write_doubles(os, k.beta->beta.data(), k.beta->beta.size());
    write_doubles(os, &k.beta->l1, 1);
  }
  const std::string bytes = os.str();
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

std::string diffop_content_id(const DiffOp& D) {
  std::ostringstream os;
  os << D.grid.c << ' ' << format_double(D.grid.A) << ' ' << D.grid.N << ' '
     << D.grid.d << '\n';
  for (const auto& t : D.terms) {
    os << t.shift.s[0] << ' ' << t.shift.s[1] << '\n';
    write_doubles(os, t.coeffs.data(), t.coeffs.size());
  }
  const std::string bytes = os.str();
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

void save_kernel_binary(const Kernel& k, const std::filesystem::path& path) {
  require_little_endian();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os.write(kKernelMagic, 8);
  const std::string header = kernel_header_json(k);
  os << header << '\n';
  write_doubles(os, k.samples.data(), k.samples.size());
  if (k.beta) {
    write_doubles(os, k.beta->beta.data(), k.beta->beta.size());
    write_doubles(os, &k.beta->l1, 1);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Kernel load_kernel_binary(const std::filesystem::path& path) {
  require_little_endian();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kKernelMagic, 8) != 0)
    throw std::runtime_error(path.string() + ": not a kernel container");
  std::string header;
  std::getline(is, header);
  const nlohmann::json j = nlohmann::json::parse(header);

  Kernel k;
  k.grid = make_grid(j.at("c").get<int>(), j.at("A").get<double>(),
                     j.at("N").get<int>(), j.at("d").get<int>());
  k.w_half = j.at("W_half").get<int>();
  if (j.at("endianness").get<std::string>() != "little")
    throw std::runtime_error(path.string() + ": unsupported endianness");
  k.samples.resize(static_cast<std::size_t>(k.grid.npoints() * k.nwin()) *
                   k.grid.d * k.grid.d);
  read_doubles(is, k.samples.data(), k.samples.size());
  if (j.at("has_beta").get<bool>()) {
    Majorant m;
    m.beta.resize(static_cast<std::size_t>(k.nwin()));
    read_doubles(is, m.beta.data(), m.beta.size());
    read_doubles(is, &m.l1, 1);
    k.beta = std::move(m);
  }
  return k;
}

void save_kernel_json(const Kernel& k, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "{\n  \"type\": \"kernel\",\n";
  os << "  \"c\": " << k.grid.c << ",\n  \"A\": " << format_double(k.grid.A)
     << ",\n  \"N\": " << k.grid.N << ",\n  \"d\": " << k.grid.d
     << ",\n  \"W_half\": " << k.w_half << ",\n";
  os << "  \"layout\": \"" << json_escape(kLayout) << "\",\n";
  os << "  \"samples\": [";
  for (std::size_t i = 0; i < k.samples.size(); ++i)
    os << (i ? "," : "") << format_double(k.samples[i]);
  os << "],\n";
  if (k.beta) {
    os << "  \"beta\": [";
    for (std::size_t i = 0; i < k.beta->beta.size(); ++i)
      os << (i ? "," : "") << format_double(k.beta->beta[i]);
    os << "],\n  \"l1\": " << format_double(k.beta->l1) << "\n";
  } else {
    os << "  \"beta\": null\n";
  }
  os << "}\n";
  write_text_file(path, os.str());
}

Kernel load_kernel_json(const std::filesystem::path& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  if (j.value("type", "") != "kernel")
    throw std::runtime_error(path.string() + ": not a kernel document");
  Kernel k;
  k.grid = make_grid(j.at("c").get<int>(), j.at("A").get<double>(),
                     j.at("N").get<int>(), j.at("d").get<int>());
  k.w_half = j.at("W_half").get<int>();
  k.samples = j.at("samples").get<std::vector<double>>();
  const std::size_t expected =
      static_cast<std::size_t>(k.grid.npoints() * k.nwin()) * k.grid.d *
      k.grid.d;
  if (k.samples.size() != expected)
    throw std::runtime_error(path.string() + ": samples length mismatch");
  if (!j.at("beta").is_null()) {
    Majorant m;
    m.beta = j.at("beta").get<std::vector<double>>();
    m.l1 = j.at("l1").get<double>();
    if (m.beta.size() != static_cast<std::size_t>(k.nwin()))
      throw std::runtime_error(path.string() + ": beta length mismatch");
    k.beta = std::move(m);
  }
  return k;
}

Kernel load_kernel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8] = {};
  is.read(magic, 8);
  is.close();
  if (std::memcmp(magic, kKernelMagic, 8) == 0) return load_kernel_binary(path);
  return load_kernel_json(path);
}

void save_diffop_json(const DiffOp& D, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "{\n  \"type\": \"diffop\",\n";
  os << "  \"c\": " << D.grid.c << ",\n  \"A\": " << format_double(D.grid.A)
     << ",\n  \"N\": " << D.grid.N << ",\n  \"d\": " << D.grid.d << ",\n";
  os << "  \"c_norm\": " << format_double(D.c_norm) << ",\n";
  os << "  \"terms\": [";
  for (std::size_t t = 0; t < D.terms.size(); ++t) {
    os << (t ? "," : "") << "\n    {\"shift\": [";
    for (int a = 0; a < D.grid.c; ++a)
      os << (a ? "," : "") << D.terms[t].shift.s[a];
    os << "], \"coeffs\": [";
    for (std::size_t i = 0; i < D.terms[t].coeffs.size(); ++i)
      os << (i ? "," : "") << format_double(D.terms[t].coeffs[i]);
    os << "]}";
  }
  os << "\n  ]\n}\n";
  write_text_file(path, os.str());
}

DiffOp load_diffop_json(const std::filesystem::path& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  if (j.value("type", "") != "diffop")
    throw std::runtime_error(path.string() + ": not a diffop document");
  const GridSpec grid =
      make_grid(j.at("c").get<int>(), j.at("A").get<double>(),
                j.at("N").get<int>(), j.at("d").get<int>());
  std::vector<DiffOpTerm> terms;
  for (const auto& jt : j.at("terms")) {
    DiffOpTerm t;
    const auto shift = jt.at("shift").get<std::vector<int>>();
    if (static_cast<int>(shift.size()) != grid.c)
      throw std::runtime_error(path.string() + ": shift dimension mismatch");
    for (int a = 0; a < grid.c; ++a) t.shift.s[a] = shift[a];
    t.coeffs = jt.at("coeffs").get<std::vector<double>>();
    terms.push_back(std::move(t));
  }
  return make_diffop(grid, std::move(terms));
}

bool is_diffop_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  char magic[8] = {};
  is.read(magic, 8);
  if (is && std::memcmp(magic, kKernelMagic, 8) == 0) return false;
  is.close();
  try {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    return j.value("type", "") == "diffop";
  } catch (...) {
    return false;
  }
}

namespace {

const char* lp_label(double p) {
  if (p == 1.0) return "1";
  if (p == 2.0) return "2";
  return "inf";
}

void append_curve(std::ostringstream& os, const char* key,
                  const std::vector<std::pair<double, double>>& curve,
                  bool trailing_comma) {
  os << "    \"" << key << "\": [";
  for (std::size_t i = 0; i < curve.size(); ++i)
    os << (i ? "," : "") << "[" << format_double(curve[i].first) << ","
       << format_double(curve[i].second) << "]";
  os << "]" << (trailing_comma ? "," : "") << "\n";
}

}  // namespace

std::string certificate_to_json(const Certificate& cert) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"subject\": \"" << json_escape(cert.subject) << "\",\n";
  os << "  \"environment\": {\"c\": " << cert.environment.c
     << ", \"A\": " << format_double(cert.environment.A)
     << ", \"N\": " << cert.environment.N
     << ", \"d\": " << cert.environment.d
     << ", \"h\": " << format_double(cert.environment.h)
     << ", \"w_quad\": " << format_double(cert.environment.w_quad) << "},\n";
  os << "  \"tolerances\": {";
  for (std::size_t i = 0; i < cert.tolerances.size(); ++i)
    os << (i ? ", " : "") << "\"" << json_escape(cert.tolerances[i].first)
       << "\": " << format_double(cert.tolerances[i].second);
  os << "},\n";
  os << "  \"checks\": [";
  for (std::size_t i = 0; i < cert.checks.size(); ++i) {
    const CheckEntry& e = cert.checks[i];
    os << (i ? "," : "") << "\n    {\"name\": \"" << json_escape(e.name)
       << "\", \"claimed_bound\": " << format_double(e.claimed_bound)
       << ", \"measured_value\": " << format_double(e.measured_value)
       << ", \"tolerance\": " << format_double(e.tolerance)
       << ", \"pass\": " << (e.pass ? "true" : "false") << "}";
  }
  os << "\n  ],\n";
  os << "  \"curves\": {\n";
  append_curve(os, "omega_n", cert.omega_n, true);
  append_curve(os, "omega_m", cert.omega_m, true);
  append_curve(os, "beta_m_decay", cert.beta_decay, true);
  os << "    \"residuals\": [";
  for (std::size_t i = 0; i < cert.residual_rows.size(); ++i)
    os << (i ? "," : "") << "[\"" << lp_label(cert.residual_rows[i][0])
       << "\"," << format_double(cert.residual_rows[i][1]) << ","
       << format_double(cert.residual_rows[i][2]) << "]";
  os << "]\n  },\n";
  os << "  \"pass\": " << (cert.passed() ? "true" : "false") << "\n";
  os << "}\n";
  return os.str();
}

std::string certificate_to_csv(const Certificate& cert) {
  std::ostringstream os;
  os << "name,claimed_bound,measured_value,tolerance,pass\n";
  for (const CheckEntry& e : cert.checks)
    os << e.name << "," << format_double(e.claimed_bound) << ","
       << format_double(e.measured_value) << "," << format_double(e.tolerance)
       << "," << (e.pass ? "pass" : "fail") << "\n";
  return os.str();
}

Certificate certificate_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Certificate cert;
  cert.subject = j.at("subject").get<std::string>();
  const auto& env = j.at("environment");
  cert.environment = make_grid(env.at("c").get<int>(), env.at("A").get<double>(),
                               env.at("N").get<int>(), env.at("d").get<int>());
  for (const auto& [key, val] : j.at("tolerances").items())
    cert.tolerances.emplace_back(key, val.get<double>());
  for (const auto& jc : j.at("checks")) {
    CheckEntry e;
    e.name = jc.at("name").get<std::string>();
    e.claimed_bound = jc.at("claimed_bound").get<double>();
    e.measured_value = jc.at("measured_value").get<double>();
    e.tolerance = jc.at("tolerance").get<double>();
    e.pass = jc.at("pass").get<bool>();
    cert.checks.push_back(std::move(e));
  }
  const auto& curves = j.at("curves");
  auto read_curve = [&](const char* key,
                        std::vector<std::pair<double, double>>& dst) {
    for (const auto& row : curves.at(key))
      dst.emplace_back(row[0].get<double>(), row[1].get<double>());
  };
  read_curve("omega_n", cert.omega_n);
  read_curve("omega_m", cert.omega_m);
  read_curve("beta_m_decay", cert.beta_decay);
  for (const auto& row : curves.at("residuals")) {
    const std::string p = row[0].get<std::string>();
    cert.residual_rows.push_back({p == "1" ? 1.0 : (p == "2" ? 2.0 : 0.0),
                                  row[1].get<double>(),
                                  row[2].get<double>()});
  }
  return cert;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace kalg
