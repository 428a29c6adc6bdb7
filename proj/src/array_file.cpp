#include "mussels/array_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include "json.hpp"

#include "mussels/errors.hpp"

namespace mussels {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "array files assume a little-endian host");

std::string_view to_string(Dtype dtype)
{
  switch (dtype) {
    case Dtype::c64:
      return "c64";
    case Dtype::c128:
      return "c128";
    case Dtype::f32:
      return "f32";
    case Dtype::f64:
      return "f64";
  }
  return "?";
}

Dtype parse_dtype(std::string_view name)
{
  if (name == "c64") {
    return Dtype::c64;
  }
  if (name == "c128") {
    return Dtype::c128;
  }
  if (name == "f32") {
    return Dtype::f32;
  }
  if (name == "f64") {
    return Dtype::f64;
  }
  throw FormatError("dtype: unknown value '" + std::string(name) + "'");
}

std::size_t dtype_size(Dtype dtype)
{
  switch (dtype) {
    case Dtype::c64:
      return 8;
    case Dtype::c128:
      return 16;
    case Dtype::f32:
      return 4;
    case Dtype::f64:
      return 8;
  }
  return 0;
}

bool is_complex(Dtype dtype) { return dtype == Dtype::c64 || dtype == Dtype::c128; }

std::size_t Array::element_count() const
{
  std::size_t n = 1;
  for (long d : shape) {
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

namespace {

template <class T>
std::vector<T> read_scalars(std::vector<std::byte> const& bytes)
{
  std::vector<T> out(bytes.size() / sizeof(T));
  std::memcpy(out.data(), bytes.data(), out.size() * sizeof(T));
  return out;
}

template <class T>
std::vector<std::byte> to_bytes(T const* data, std::size_t count)
{
  std::vector<std::byte> out(count * sizeof(T));
  std::memcpy(out.data(), data, out.size());
  return out;
}

std::string describe(std::vector<long> const& shape)
{
  std::string s = "[";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    s += (k ? ", " : "") + std::to_string(shape[k]);
  }
  return s + "]";
}

void expect_shape(Array const& a, std::size_t rank, bool complex, char const* what)
{
  if (a.shape.size() != rank) {
    throw DimensionError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got shape " +
                         describe(a.shape));
  }
  if (is_complex(a.dtype) != complex) {
    throw DimensionError(std::string(what) + ": unexpected dtype " + std::string(to_string(a.dtype)));
  }
}

}  // namespace

std::vector<cplx> Array::complex_values() const
{
  if (dtype == Dtype::c128) {
    return read_scalars<cplx>(bytes);
  }
  if (dtype == Dtype::c64) {
    auto const f = read_scalars<std::complex<float>>(bytes);
    return {f.begin(), f.end()};
  }
  throw DimensionError("array holds real values, complex requested");
}

std::vector<double> Array::real_values() const
{
  if (dtype == Dtype::f64) {
    return read_scalars<double>(bytes);
  }
  if (dtype == Dtype::f32) {
    auto const f = read_scalars<float>(bytes);
    return {f.begin(), f.end()};
  }
  throw DimensionError("array holds complex values, real requested");
}

Array make_array(std::vector<long> shape, std::span<cplx const> values)
{
  Array a{std::move(shape), Dtype::c128, to_bytes(values.data(), values.size())};
  if (a.element_count() != values.size()) {
    throw DimensionError("make_array: shape " + describe(a.shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  return a;
}

Array make_array(std::vector<long> shape, std::span<double const> values)
{
  Array a{std::move(shape), Dtype::f64, to_bytes(values.data(), values.size())};
  if (a.element_count() != values.size()) {
    throw DimensionError("make_array: shape " + describe(a.shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  return a;
}

void save_array(fs::path const& header_path, Array const& array)
{
  if (array.bytes.size() != array.element_count() * dtype_size(array.dtype)) {
    throw FormatError("payload: " + std::to_string(array.bytes.size()) + " bytes do not match shape " +
                      describe(array.shape));
  }
  fs::path payload = header_path;
  payload.replace_extension(".bin");
  json header = {{"shape", array.shape},
                 {"dtype", std::string(to_string(array.dtype))},
                 {"order", "row-major"},
                 {"endian", "little"},
                 {"payload", payload.filename().string()}};
  {
    std::ofstream out(payload, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<char const*>(array.bytes.data()), static_cast<std::streamsize>(array.bytes.size()));
    if (!out) {
      throw std::runtime_error("cannot write " + payload.string());
    }
  }
  std::ofstream out(header_path, std::ios::trunc);
  out << header.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("cannot write " + header_path.string());
  }
}

Array load_array(fs::path const& header_path)
{
  std::ifstream in(header_path);
  if (!in) {
    throw FormatError("header: cannot open " + header_path.string());
  }
  json header;
  try {
    header = json::parse(in);
  } catch (json::parse_error const& e) {
    throw FormatError("header: invalid JSON in " + header_path.string() + ": " + e.what());
  }
  auto field = [&](char const* name) -> json const& {
    if (!header.is_object() || !header.contains(name)) {
      throw FormatError(std::string(name) + ": missing from " + header_path.string());
    }
    return header.at(name);
  };

  Array a;
  json const& shape = field("shape");
  if (!shape.is_array()) {
    throw FormatError("shape: expected an array of non-negative integers");
  }
  for (auto const& d : shape) {
    if (!d.is_number_integer() || d.get<long>() < 0) {
      throw FormatError("shape: expected an array of non-negative integers");
    }
    a.shape.push_back(d.get<long>());
  }
  json const& dtype = field("dtype");
  if (!dtype.is_string()) {
    throw FormatError("dtype: expected a string");
  }
  a.dtype = parse_dtype(dtype.get<std::string>());
  json const& order = field("order");
  if (!order.is_string() || order.get<std::string>() != "row-major") {
    throw FormatError("order: only \"row-major\" is supported, got " + order.dump());
  }
  json const& endian = field("endian");
  if (!endian.is_string() || endian.get<std::string>() != "little") {
    throw FormatError("endian: only \"little\" is supported, got " + endian.dump());
  }
  json const& payload_name = field("payload");
  if (!payload_name.is_string()) {
    throw FormatError("payload: expected a relative file name");
  }
  fs::path const payload = header_path.parent_path() / payload_name.get<std::string>();
  std::ifstream pin(payload, std::ios::binary);
  if (!pin) {
    throw FormatError("payload: cannot open " + payload.string());
  }
  std::vector<char> raw((std::istreambuf_iterator<char>(pin)), std::istreambuf_iterator<char>());
  std::size_t const expected = a.element_count() * dtype_size(a.dtype);
  if (raw.size() != expected) {
    throw FormatError("payload: expected " + std::to_string(expected) + " bytes for shape " + describe(a.shape) +
                      " and dtype " + std::string(to_string(a.dtype)) + ", found " + std::to_string(raw.size()));
  }
  a.bytes.resize(raw.size());
  std::memcpy(a.bytes.data(), raw.data(), raw.size());
  return a;
}

Array to_array(MultishotImage const& x)
{
  std::vector<cplx> v;
  v.reserve(x.size());
  for (auto const& s : x.shots()) {
    v.insert(v.end(), s.values().begin(), s.values().end());
  }
  return make_array({x.n_shots(), x.rows(), x.cols()}, std::span<cplx const>(v));
}

Array to_array(KspaceData const& y)
{
  std::vector<cplx> v;
  for (long i = 0; i < y.n_shots(); ++i) {
    for (long j = 0; j < y.n_coils(); ++j) {
      auto const s = y.at(i, j).values();
      v.insert(v.end(), s.begin(), s.end());
    }
  }
  return make_array({y.n_shots(), y.n_coils(), y.rows(), y.cols()}, std::span<cplx const>(v));
}

Array to_array(CoilMaps const& maps)
{
  std::vector<cplx> v;
  for (auto const& m : maps.maps()) {
    v.insert(v.end(), m.values().begin(), m.values().end());
  }
  return make_array({maps.n_coils(), maps.rows(), maps.cols()}, std::span<cplx const>(v));
}

Array to_array(ShotMasks const& masks)
{
  std::vector<double> v;
  for (long i = 0; i < masks.n_shots(); ++i) {
    for (auto b : masks[i].bits) {
      v.push_back(b != 0 ? 1.0 : 0.0);
    }
  }
  return make_array({masks.n_shots(), masks.rows(), masks.cols()}, std::span<double const>(v));
}

Array to_array(RealImage const& img) { return make_array({img.rows, img.cols}, std::span<double const>(img.data)); }

MultishotImage multishot_from_array(Array const& a)
{
  expect_shape(a, 3, true, "multishot array");
  auto const v = a.complex_values();
  long const plane = a.shape[1] * a.shape[2];
  std::vector<ComplexImage> shots;
  for (long i = 0; i < a.shape[0]; ++i) {
    shots.emplace_back(a.shape[1], a.shape[2], std::vector<cplx>(v.begin() + i * plane, v.begin() + (i + 1) * plane));
  }
  return MultishotImage(std::move(shots));
}

KspaceData kspace_from_array(Array const& a)
{
  expect_shape(a, 4, true, "k-space array");
  auto const v = a.complex_values();
  KspaceData y(a.shape[0], a.shape[1], a.shape[2], a.shape[3]);
  long const plane = a.shape[2] * a.shape[3];
  for (long i = 0; i < a.shape[0]; ++i) {
    for (long j = 0; j < a.shape[1]; ++j) {
      auto const off = (i * a.shape[1] + j) * plane;
      std::copy(v.begin() + off, v.begin() + off + plane, y.at(i, j).values().begin());
    }
  }
  return y;
}

CoilMaps coil_maps_from_array(Array const& a)
{
  expect_shape(a, 3, true, "coil map array");
  auto const v = a.complex_values();
  long const plane = a.shape[1] * a.shape[2];
  std::vector<ComplexImage> maps;
  for (long j = 0; j < a.shape[0]; ++j) {
    maps.emplace_back(a.shape[1], a.shape[2], std::vector<cplx>(v.begin() + j * plane, v.begin() + (j + 1) * plane));
  }
  return CoilMaps(std::move(maps));
}

ShotMasks shot_masks_from_array(Array const& a)
{
  expect_shape(a, 3, false, "mask array");
  auto const v = a.real_values();
  long const plane = a.shape[1] * a.shape[2];
  std::vector<Mask> masks;
  for (long i = 0; i < a.shape[0]; ++i) {
    Mask m(a.shape[1], a.shape[2]);
    for (long k = 0; k < plane; ++k) {
      double const b = v[static_cast<std::size_t>(i * plane + k)];
      if (b != 0.0 && b != 1.0) {
        throw DimensionError("mask array: values must be 0 or 1");
      }
      m.bits[static_cast<std::size_t>(k)] = b != 0.0 ? 1 : 0;
    }
    masks.push_back(std::move(m));
  }
  return ShotMasks(std::move(masks));
}

RealImage real_image_from_array(Array const& a)
{
  expect_shape(a, 2, false, "image array");
  RealImage img(a.shape[0], a.shape[1]);
  img.data = a.real_values();
  return img;
}

}  // namespace mussels
