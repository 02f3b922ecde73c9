#include "bubblezoom/table_io.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace bz {

namespace {

constexpr const char* kMagic = "bubblezoom-stabtable";
constexpr int kVersion = 1;

void expect(std::istream& is, const std::string& word) {
  std::string w;
  if (!(is >> w) || w != word) throw InvalidArgument("stab table file: expected '" + word + "', got '" + w + "'");
}

double read_double(std::istream& is) {
  std::string w;
  if (!(is >> w)) throw InvalidArgument("stab table file: unexpected end of input");
  char* end = nullptr;
  const double v = std::strtod(w.c_str(), &end);
  if (end != w.c_str() + w.size()) throw InvalidArgument("stab table file: bad number '" + w + "'");
  return v;
}

int read_int(std::istream& is) {
  int v = 0;
  if (!(is >> v)) throw InvalidArgument("stab table file: expected an integer");
  return v;
}

void write_matrix(std::ostream& os, const char* name, const LocalMatrix& m) {
  os << name;
  for (int i = 0; i < local::kCount; ++i)
    for (int j = 0; j < local::kCount; ++j) os << ' ' << m(i, j);
  os << '\n';
}

void read_matrix(std::istream& is, const char* name, LocalMatrix& m) {
  expect(is, name);
  for (int i = 0; i < local::kCount; ++i)
    for (int j = 0; j < local::kCount; ++j) m(i, j) = read_double(is);
}

}  // namespace

void save_tables(const StabCache& cache, std::ostream& os) {
  const auto tables = cache.tables();
  const auto flags = os.flags();
  os << kMagic << ' ' << kVersion << '\n';
  os << "M " << cache.options().M << '\n';
  os << "tables " << tables.size() << '\n';
  os << std::hexfloat;
  for (const auto& t : tables) {
    const auto& c = t->coeffs;
    os << "table " << c.eps << ' ' << c.a.x << ' ' << c.a.y << ' ' << c.c << ' ' << c.level << ' ' << c.physical_h
       << ' ' << t->depth << ' ' << t->max_residual << '\n';
    write_matrix(os, "diffusion", t->diffusion);
    write_matrix(os, "advection", t->advection);
    write_matrix(os, "mass", t->mass);
    os << "integral";
    for (int i = 0; i < local::kCount; ++i) os << ' ' << t->integral(i);
    os << '\n';
    for (int k = 0; k < 8; ++k) {
      os << "field " << std::dec << (local::kBubble + k) << std::hexfloat;
      for (double v : t->fields[k].values) os << ' ' << v;
      os << '\n';
    }
  }
  os.flags(flags);
}

void load_tables(StabCache& cache, std::istream& is) {
  expect(is, kMagic);
  if (const int v = read_int(is); v != kVersion) {
    throw InvalidArgument("stab table file: unsupported version " + std::to_string(v));
  }
  expect(is, "M");
  const int M = read_int(is);
  if (M != cache.options().M) throw InvalidArgument("stab table file: computed with a different M");
  expect(is, "tables");
  const int n = read_int(is);
  for (int i = 0; i < n; ++i) {
    auto t = std::make_shared<ElementTable>();
    expect(is, "table");
    t->M = M;
    t->coeffs.eps = read_double(is);
    t->coeffs.a.x = read_double(is);
    t->coeffs.a.y = read_double(is);
    t->coeffs.c = read_double(is);
    t->coeffs.level = read_int(is);
    t->coeffs.physical_h = read_double(is);
    t->depth = read_int(is);
    t->max_residual = read_double(is);
    read_matrix(is, "diffusion", t->diffusion);
    read_matrix(is, "advection", t->advection);
    read_matrix(is, "mass", t->mass);
    expect(is, "integral");
    for (int k = 0; k < local::kCount; ++k) t->integral(k) = read_double(is);
    for (int k = 0; k < 8; ++k) {
      expect(is, "field");
      if (read_int(is) != local::kBubble + k) throw InvalidArgument("stab table file: fields out of order");
      t->fields[k] = FineField(M, M, 1.0, 1.0);
      for (double& v : t->fields[k].values) v = read_double(is);
    }
    cache.insert(std::move(t));
  }
}

void save_tables(const StabCache& cache, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path.string());
  save_tables(cache, os);
}

void load_tables(StabCache& cache, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read " + path.string());
  load_tables(cache, is);
}

}  // namespace bz
