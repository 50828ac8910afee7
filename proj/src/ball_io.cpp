// Binary ball-table files.
//
//   magic        8 bytes  "SOLGBALL"
//   version      u32      kBallFileVersion
//   encoding     u8       kEncodingVersion
//   family       u8, modulus u32, matrix 4 x i64
//   letters      u32 count, then per letter: u32 len + encoding, u32 len + name
//   b            u32 count, then f64 each
//   radii        i32 requested, i32 complete
//   entries      u64 count, then per entry sorted by encoding:
//                u32 len + encoding, u16 word length
//
// All integers little-endian.

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <cmath>
#include <numeric>

#include "solgeom/metric.hpp"
#include "solgeom/valuations.hpp"

namespace solgeom {

namespace {

constexpr char kMagic[8] = {'S', 'O', 'L', 'G', 'B', 'A', 'L', 'L'};
constexpr std::uint32_t kBallFileVersion = 1;

class Writer {
public:
  explicit Writer(std::ostream &os) : os_(os) {}

  template <class T> void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      char b[sizeof(T)];
      std::memcpy(b, &v, sizeof(T));
      std::reverse(b, b + sizeof(T));
      os_.write(b, sizeof(T));
    } else {
      os_.write(reinterpret_cast<const char *>(&v), sizeof(T));
    }
  }

  void bytes(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

private:
  std::ostream &os_;
};

class FileReader {
public:
  explicit FileReader(std::istream &is) : is_(is) {}

  template <class T> T get() {
    char b[sizeof(T)];
    if (!is_.read(b, sizeof(T)))
      throw std::runtime_error("ball file truncated");
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1)
      std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }

  std::string bytes() {
    auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    if (n && !is_.read(s.data(), n))
      throw std::runtime_error("ball file truncated");
    return s;
  }

private:
  std::istream &is_;
};

} // namespace

void BallTable::save(const std::filesystem::path &path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  Writer w(os);
  os.write(kMagic, sizeof kMagic);
  w.put(kBallFileVersion);
  w.put(kEncodingVersion);
  w.put(static_cast<std::uint8_t>(group_.family()));
  w.put(group_.modulus());
  const Matrix2 &m = group_.matrix();
  for (std::int64_t v : {m.a, m.b, m.c, m.d})
    w.put(v);
  w.put(static_cast<std::uint32_t>(gens_.size()));
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    w.bytes(group_.encode(gens_.letters[i]));
    w.bytes(gens_.names[i]);
  }
  w.put(static_cast<std::uint32_t>(gens_.b.size()));
  for (double v : gens_.b)
    w.put(v);
  w.put(static_cast<std::int32_t>(requested_));
  w.put(static_cast<std::int32_t>(radius_));
  std::vector<std::uint32_t> order(size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t x, std::uint32_t y) { return keys_[x] < keys_[y]; });
  w.put(static_cast<std::uint64_t>(order.size()));
  for (auto i : order) {
    w.bytes(keys_[i]);
    w.put(lengths_[i]);
  }
  if (!os)
    throw std::runtime_error("failed writing " + path.string());
}

BallTable BallTable::load(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("cannot open ball file " + path.string());
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error(path.string() + " is not a ball file");
  FileReader r(is);
  if (r.get<std::uint32_t>() != kBallFileVersion)
    throw std::runtime_error("unsupported ball file version");
  if (r.get<std::uint8_t>() != kEncodingVersion)
    throw std::runtime_error("unsupported element encoding version");
  const auto family = static_cast<Family>(r.get<std::uint8_t>());
  const auto q = r.get<std::uint32_t>();
  Matrix2 m;
  m.a = r.get<std::int64_t>();
  m.b = r.get<std::int64_t>();
  m.c = r.get<std::int64_t>();
  m.d = r.get<std::int64_t>();
  Group group = family == Family::Lamplighter ? Group::lamplighter(q)
                : family == Family::Z16       ? Group::z16()
                : family == Family::Sol       ? Group::sol(m)
                                              : throw std::runtime_error("bad family tag");
  GenSet gens;
  const auto nletters = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < nletters; ++i) {
    gens.letters.push_back(group.decode(r.bytes()));
    gens.names.push_back(r.bytes());
  }
  const auto nb = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < nb; ++i)
    gens.b.push_back(r.get<double>());
  for (const auto &l : gens.letters)
    gens.z = std::max(gens.z, std::fabs(b_functional(gens.b, l.shift)));

  BallTable table(std::move(group), std::move(gens));
  table.requested_ = r.get<std::int32_t>();
  table.radius_ = r.get<std::int32_t>();
  const auto count = r.get<std::uint64_t>();
  std::vector<std::pair<std::string, std::uint16_t>> entries(count);
  for (auto &[key, len] : entries) {
    key = r.bytes();
    len = r.get<std::uint16_t>();
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto &x, const auto &y) { return x.second < y.second; });
  table.spheres_.assign(static_cast<std::size_t>(table.radius_ + 1), 0);
  for (auto &[key, len] : entries) {
    if (len > table.radius_)
      throw std::runtime_error("ball file entry beyond its radius");
    ++table.spheres_[len];
    table.insert(std::move(key), len, 0xffffffffu, 0);
  }
  table.rebuild_parents();
  return table;
}

} // namespace solgeom
