#include "urlab/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <openssl/evp.h>

namespace urlab {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Check within(std::string name, double estimate, double se, double target, double floor, double se_multiplier) {
  Check c;
  c.name = std::move(name);
  c.target = target;
  c.estimate = estimate;
  c.se = se;
  c.tolerance = std::max(floor, se_multiplier * se);
  c.pass = std::isfinite(estimate) && std::fabs(estimate - target) <= c.tolerance;
  return c;
}

Check predicate(std::string name, double estimate, double se, double target, double tolerance, bool pass,
                std::string note) {
  return {std::move(name), target, estimate, se, tolerance, pass, std::move(note)};
}

Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["target"] = c.target;
  j["estimate"] = c.estimate;
  j["se"] = c.se;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const McSummary& s) {
  Json j;
  j["statistic"] = s.statistic;
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["mc_se"] = s.mc_se;
  j["reps"] = s.reps;
  j["seed"] = s.seed;
  j["target"] = s.target;
  j["ratio"] = s.ratio;
  return j;
}

Json to_json(const NamedEstimate& e) {
  Json j;
  j["name"] = e.name;
  j["value"] = e.value;
  j["se"] = e.se;
  j["m"] = e.m;
  j["reps"] = e.reps;
  j["seed"] = e.seed;
  return j;
}

void write_summary_csv(std::ostream& os, std::span<const McSummary> rows) {
  os << "statistic,n,mean,mc_se,reps,seed\n";
  for (const auto& r : rows) {
    os << r.statistic << ',' << r.n << ',' << format_double(r.mean) << ',' << format_double(r.mc_se) << ','
       << r.reps << ',' << r.seed << '\n';
  }
}

void print_check_table(std::ostream& os, std::span<const Check> checks) {
  std::size_t width = 5;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %12s %12s %10s %10s  %s\n", static_cast<int>(width), "check", "target",
                "estimate", "mc_se", "tol", "result");
  os << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-*s %12.5g %12.5g %10.3g %10.3g  %s\n", static_cast<int>(width),
                  c.name.c_str(), c.target, c.estimate, c.se, c.tolerance, c.pass ? "PASS" : "FAIL");
    os << line;
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

ArtifactSink::ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void ArtifactSink::write_text(const std::string& name, const std::string& content) {
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
  out << content;
  out.close();
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void ArtifactSink::write_json(const std::string& name, const Json& doc) { write_text(name, doc.dump(2) + "\n"); }

Json ArtifactSink::checksums() const {
  Json list = Json::array();
  for (const auto& f : files_) {
    Json j;
    j["file"] = f;
    j["sha256"] = sha256_file(dir_ / f);
    list.push_back(j);
  }
  return list;
}

}  // namespace urlab
