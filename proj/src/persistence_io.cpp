#include "fpc/persistence_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include <zlib.h>

#include "fpc/error.hpp"

namespace fpc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line, std::size_t column) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw DataFormatError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                              ": cannot parse '" + std::string(field) + "' as a number",
                          line);
  }
  if (!std::isfinite(value)) {
    throw DataFormatError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                              ": non-finite value '" + std::string(field) + "'",
                          line);
  }
  return value;
}

double map_label(double raw, LabelEncoding enc, std::size_t line) {
  if (enc == LabelEncoding::ZeroOne) {
    if (raw == 0.0) return -1.0;
    if (raw == 1.0) return 1.0;
  } else if (raw == -1.0 || raw == 1.0) {
    return raw;
  }
  throw DataFormatError("line " + std::to_string(line) + ": label " + std::to_string(raw) +
                            (enc == LabelEncoding::ZeroOne ? " is not 0 or 1" : " is not -1 or +1"),
                        line);
}

// Little-endian byte writer / reader.
class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                       std::uint8_t>>>;
    auto bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(bits & 0xffu));
      if constexpr (sizeof(T) > 1) bits = static_cast<U>(bits >> 8);
    }
  }
  void put_raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                       std::uint8_t>>>;
    if (pos_ + sizeof(T) > bytes_.size()) throw ChecksumError("model file is truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits = static_cast<U>(bits | (static_cast<U>(bytes_[pos_ + i]) << (8 * i)));
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr std::string_view kMagic = "FPC1";
constexpr std::size_t kFixedHeaderBytes = 4 + 4 + 4 + 4 + 8 + 8 + 8 * 3 + 4 + 4 + 4 + 8 * 4;

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<double> features;
  std::vector<double> labels;
  std::size_t width = 0;  // feature columns
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && options.header) continue;
    const std::string_view row = trim(line);
    if (row.empty()) continue;

    std::size_t columns = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t end = row.find(options.delimiter, start);
      const std::string_view field =
          row.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      features.push_back(parse_field(field, line_no, columns + 1));
      ++columns;
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    const std::size_t row_width = options.features_only ? columns : columns - 1;
    if (row_width == 0) {
      throw DataFormatError("line " + std::to_string(line_no) + ": no feature columns", line_no);
    }
    if (width == 0) {
      width = row_width;
    } else if (row_width != width) {
      throw DataFormatError("line " + std::to_string(line_no) + ": expected " +
                                std::to_string(width + (options.features_only ? 0 : 1)) +
                                " columns, found " + std::to_string(columns),
                            line_no);
    }
    if (options.features_only) {
      labels.push_back(1.0);
    } else {
      labels.push_back(map_label(features.back(), options.labels, line_no));
      features.pop_back();
    }
  }
  if (in.bad()) throw IoError("read error while parsing CSV");

  Dataset out;
  const auto m = static_cast<Eigen::Index>(labels.size());
  out.x = Eigen::Map<const RowMatrix>(features.data(), m, static_cast<Eigen::Index>(width));
  out.y = Eigen::Map<const Eigen::VectorXd>(labels.data(), m);
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data, bool header) {
  const auto old_precision = out.precision(17);
  if (header) {
    for (std::size_t k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
    out << "y\n";
  }
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index k = 0; k < data.x.cols(); ++k) out << data.x(i, k) << ',';
    out << (data.y(i) > 0 ? 1 : -1) << '\n';
  }
  out.precision(old_precision);
}

void save_csv(const std::filesystem::path& path, const Dataset& data, bool header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out, data, header);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<std::uint8_t> save_model(const FpcModel& model) {
  const auto& sum = model.summary();
  const auto n = static_cast<std::uint64_t>(model.sparsity());
  const auto d = static_cast<std::uint32_t>(model.input_dim());

  ByteWriter w;
  w.put_raw(kMagic);
  w.put<std::uint8_t>(kModelFormatVersion);
  w.put<std::uint8_t>(model.scaling().enabled ? 1 : 0);
  w.put<std::uint16_t>(0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.degree().value()));
  w.put<std::uint32_t>(d);
  w.put<std::uint64_t>(n);
  w.put<std::uint64_t>(sum.m);
  w.put<double>(sum.params.alpha);
  w.put<double>(sum.params.beta);
  w.put<double>(sum.params.tol);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sum.params.max_iters));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sum.iterations));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(sum.scheme));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(sum.stop));
  w.put<std::uint16_t>(0);
  w.put<double>(sum.final_objective);
  w.put<double>(sum.final_h_step);
  w.put<double>(sum.train_seconds);
  w.put<std::uint64_t>(sum.seed);
  for (Eigen::Index k = 0; k < model.scaling().lo.size(); ++k) w.put<double>(model.scaling().lo(k));
  for (Eigen::Index k = 0; k < model.scaling().hi.size(); ++k) w.put<double>(model.scaling().hi(k));
  const RowMatrix& c = model.centers();
  for (Eigen::Index i = 0; i < c.size(); ++i) w.put<double>(c.data()[i]);
  for (Eigen::Index j = 0; j < model.coefficients().size(); ++j) w.put<double>(model.coefficients()(j));
  w.put<std::uint32_t>(crc_of(w.bytes()));
  return std::move(w.bytes());
}

FpcModel load_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() + 1 ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ModelFormatError("not an FPC model file (bad magic bytes)");
  }
  const std::uint8_t version = bytes[kMagic.size()];
  if (version != kModelFormatVersion) {
    throw UnsupportedVersionError("unsupported model format version " + std::to_string(version) +
                                  " (this build reads version " +
                                  std::to_string(kModelFormatVersion) + ")");
  }
  if (bytes.size() < kFixedHeaderBytes + 4) throw ChecksumError("model file is truncated");

  ByteReader r(bytes);
  r.get<std::uint32_t>();  // magic
  r.get<std::uint8_t>();   // version
  const bool scaling_on = (r.get<std::uint8_t>() & 1u) != 0;
  r.get<std::uint16_t>();
  const auto s = r.get<std::uint32_t>();
  const auto d = r.get<std::uint32_t>();
  const auto n = r.get<std::uint64_t>();

  // Size check before trusting n and d for allocation.
  const unsigned __int128 payload =
      static_cast<unsigned __int128>(8) * (2u * static_cast<unsigned __int128>(d) +
                                           static_cast<unsigned __int128>(n) * d + n);
  if (kFixedHeaderBytes + payload + 4 != bytes.size()) {
    throw ChecksumError("model file size does not match its header (truncated or corrupt)");
  }
  const std::size_t body = bytes.size() - 4;
  ByteReader tail(bytes.subspan(body));
  if (tail.get<std::uint32_t>() != crc_of(bytes.first(body))) {
    throw ChecksumError("model file checksum mismatch");
  }

  TrainingSummary sum;
  sum.m = static_cast<std::size_t>(r.get<std::uint64_t>());
  sum.params.alpha = r.get<double>();
  sum.params.beta = r.get<double>();
  sum.params.tol = r.get<double>();
  sum.params.max_iters = static_cast<int>(r.get<std::uint32_t>());
  sum.iterations = static_cast<int>(r.get<std::uint32_t>());
  const auto scheme = r.get<std::uint8_t>();
  const auto stop = r.get<std::uint8_t>();
  if (scheme > 2 || stop > 1) throw ModelFormatError("model file has an invalid enum field");
  sum.scheme = static_cast<CenterScheme>(scheme);
  sum.stop = static_cast<StopReason>(stop);
  r.get<std::uint16_t>();
  sum.final_objective = r.get<double>();
  sum.final_h_step = r.get<double>();
  sum.train_seconds = r.get<double>();
  sum.seed = r.get<std::uint64_t>();

  MinMaxScaler scaling;
  scaling.enabled = scaling_on;
  scaling.lo.resize(d);
  scaling.hi.resize(d);
  for (std::uint32_t k = 0; k < d; ++k) scaling.lo(k) = r.get<double>();
  for (std::uint32_t k = 0; k < d; ++k) scaling.hi(k) = r.get<double>();
  RowMatrix centers(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = r.get<double>();
  Eigen::VectorXd coef(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < coef.size(); ++j) coef(j) = r.get<double>();

  if (s < 1 || s > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw ModelFormatError("model file has an invalid degree");
  }
  return FpcModel(KernelDegree(static_cast<int>(s)), std::move(centers), std::move(coef),
                  std::move(scaling), sum);
}

void save_model_file(const std::filesystem::path& path, const FpcModel& model) {
  const auto bytes = save_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

FpcModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_model(bytes);
}

}  // namespace fpc
