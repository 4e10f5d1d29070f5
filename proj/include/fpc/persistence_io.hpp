#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "fpc/dataset.hpp"
#include "fpc/fpc_model.hpp"

namespace fpc {

enum class LabelEncoding {
  PlusMinusOne,  // labels must be -1 or +1
  ZeroOne,       // 0 -> -1, 1 -> +1
};

struct CsvOptions {
  bool header = false;  // skip the first line
  LabelEncoding labels = LabelEncoding::PlusMinusOne;
  char delimiter = ',';
  /// Rows carry only the d features; labels are set to +1. Used by predict.
  bool features_only = false;
};

/// Streams the file line by line: d feature columns then one label column.
/// Blank lines are skipped. Errors name the 1-based line number.
Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes x1..xd,y with 17 significant digits, labels as -1/1.
void write_csv(std::ostream& out, const Dataset& data, bool header = false);
void save_csv(const std::filesystem::path& path, const Dataset& data, bool header = false);

inline constexpr std::uint8_t kModelFormatVersion = 1;

/// Binary model layout (all integers and doubles little-endian):
///
///   "FPC1" | u8 version | u8 flags (bit0: scaling on) | u16 reserved
///   u32 s | u32 d | u64 n | u64 m | f64 alpha | f64 beta | f64 tol
///   u32 max_iters | u32 iterations | u8 scheme | u8 stop | u16 reserved
///   f64 final_objective | f64 final_h_step | f64 train_seconds | u64 seed
///   f64 lo[d] | f64 hi[d] | f64 centers[n*d] (row-major) | f64 coef[n]
///   u32 crc32 of every preceding byte
std::vector<std::uint8_t> save_model(const FpcModel& model);

/// Checks magic and version first (UnsupportedVersionError), then size and
/// checksum (ChecksumError).
FpcModel load_model(std::span<const std::uint8_t> bytes);

void save_model_file(const std::filesystem::path& path, const FpcModel& model);
FpcModel load_model_file(const std::filesystem::path& path);

}  // namespace fpc
