#include "mflab/coeff_cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mflab/error.hpp"

namespace mflab::qexp {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "mflab-qexp-cache";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool expect_field(std::istream& in, std::string_view key, std::string& value) {
  std::string line;
  if (!std::getline(in, line)) return false;
  if (line.size() <= key.size() + 1 || line.compare(0, key.size(), key) != 0 ||
      line[key.size()] != ' ') {
    return false;
  }
  value = line.substr(key.size() + 1);
  return true;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

CoefficientCache::CoefficientCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path CoefficientCache::path_for(int weight, std::size_t n_terms) const {
  return dir_ / ("f" + std::to_string(weight) + "_" + std::to_string(n_terms) + ".qexp");
}

std::optional<Eigenform> CoefficientCache::read_file(const fs::path& path, int weight,
                                                     std::size_t n_terms) const {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line, value;
  if (!std::getline(in, line) || line != kMagic) return std::nullopt;
  if (!expect_field(in, "version", value) || value != std::to_string(kCacheFormatVersion)) {
    return std::nullopt;
  }
  if (!expect_field(in, "weight", value) || value != std::to_string(weight)) return std::nullopt;
  if (!expect_field(in, "n_terms", value)) return std::nullopt;
  std::size_t stored_terms = 0;
  try {
    stored_terms = std::stoull(value);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (stored_terms < n_terms) return std::nullopt;
  if (!expect_field(in, "checksum", value) || value.rfind("fnv1a64:", 0) != 0) {
    return std::nullopt;
  }
  const std::string expected = value.substr(8);

  QSeries s;
  s.coeffs.reserve(stored_terms);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (std::getline(in, line)) {
    h = fnv1a64(line, h);
    h = fnv1a64("\n", h);
    mpz_class c;
    if (c.set_str(line, 10) != 0) return std::nullopt;
    s.coeffs.push_back(std::move(c));
  }
  if (s.coeffs.size() != stored_terms || hex64(h) != expected) return std::nullopt;
  s.coeffs.resize(n_terms);
  try {
    return Eigenform(weight, std::move(s));
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<Eigenform> CoefficientCache::load(int weight, std::size_t n_terms) const {
  if (auto exact = read_file(path_for(weight, n_terms), weight, n_terms)) return exact;
  // Any longer expansion of the same weight is just as good.
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) return std::nullopt;
  const std::string prefix = "f" + std::to_string(weight) + "_";
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".qexp") continue;
    if (auto f = read_file(entry.path(), weight, n_terms)) return f;
  }
  return std::nullopt;
}

void CoefficientCache::store(const Eigenform& f) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create cache directory " + dir_.string() + ": " + ec.message());

  std::string body;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : f.series().coeffs) {
    std::string line = c.get_str();
    line += '\n';
    h = fnv1a64(line, h);
    body += line;
  }
  std::ostringstream header;
  header << kMagic << "\nversion " << kCacheFormatVersion << "\nweight " << f.weight()
         << "\nn_terms " << f.n_terms() << "\nchecksum fnv1a64:" << hex64(h) << "\n";

  const fs::path target = path_for(f.weight(), f.n_terms());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << header.str() << body;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

Eigenform CoefficientCache::get_or_compute(int weight, std::size_t n_terms,
                                           std::size_t terms_cap) const {
  if (auto cached = load(weight, n_terms)) return std::move(*cached);
  Eigenform f = eigenform(weight, n_terms, terms_cap);
  store(f);
  return f;
}

}  // namespace mflab::qexp
