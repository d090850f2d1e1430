#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "zkb/harness.hpp"

namespace zkb::harness {

namespace {

constexpr const char* kCsvHeader = "t,l2,diss_cum,w_l2,w_h1,sup_w,tail";

double parse_double(std::string_view field, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed number '" + std::string(field) + "' in " + context);
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 16);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

void write_series_csv(const std::filesystem::path& path, const std::vector<NormSample>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const NormSample& s : samples) {
    out << format_number(s.t) << ',' << format_number(s.l2) << ',' << format_number(s.diss_cum) << ','
        << format_number(s.w_l2) << ',' << format_number(s.w_h1) << ',' << format_number(s.sup_w) << ','
        << format_number(s.tail) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<NormSample> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error(path.string() + ": missing or unexpected CSV header");
  }
  std::vector<NormSample> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::array<double, 7> v{};
    std::size_t start = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      const std::size_t end = line.find(',', start);
      const bool last = c + 1 == v.size();
      if ((end == std::string::npos) != last) {
        throw std::runtime_error(path.string() + ": wrong column count on line " + std::to_string(row));
      }
      const std::string_view field(line.data() + start, (last ? line.size() : end) - start);
      v[c] = parse_double(field, path.string() + " line " + std::to_string(row));
      start = end + 1;
    }
    samples.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return samples;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 15]);
  }
  return hex;
}

bool verify_manifest(const std::filesystem::path& dir, std::ostream& report) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) {
    report << "missing manifest.json in " << dir.string() << '\n';
    return false;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    report << "unreadable manifest: " << e.what() << '\n';
    return false;
  }
  if (!doc.contains("files") || !doc["files"].is_array()) {
    report << "manifest lists no files\n";
    return false;
  }
  bool ok = true;
  for (const auto& f : doc["files"]) {
    const std::string name = f.value("name", "");
    const std::string expected = f.value("sha256", "");
    const auto path = dir / name;
    if (name.empty() || !std::filesystem::exists(path)) {
      report << "missing file: " << name << '\n';
      ok = false;
      continue;
    }
    if (sha256_file(path) != expected) {
      report << "checksum mismatch: " << name << '\n';
      ok = false;
    }
  }
  return ok;
}

}  // namespace zkb::harness
