#include "loopsfm/frames_io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "loopsfm/error.h"

namespace loopsfm {
namespace {

std::string FormatValue(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string()
                         : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string IoError(int line_number, const std::string& what) {
  return "line " + std::to_string(line_number) + ": " + what;
}

}  // namespace

FrameObservation FrameRecord::ToObservation() const {
  FrameObservation obs;
  obs.frame_index = frame_index;
  obs.sq_proj.reserve(distances.size());
  for (double d : distances) obs.sq_proj.push_back(d * d);
  return obs;
}

std::vector<FrameObservation> ToObservations(
    std::span<const FrameRecord> records) {
  std::vector<FrameObservation> out;
  out.reserve(records.size());
  for (const FrameRecord& r : records) out.push_back(r.ToObservation());
  return out;
}

void WriteFramesCsv(std::ostream& out, std::span<const FrameRecord> records) {
  const std::size_t n = records.empty() ? 4 : records.front().distances.size();
  if (n == 3) {
    out << "frame,pq,qr,rp\n";
  } else if (n == 4) {
    out << "frame,pq,qr,rs,sp\n";
  } else {
    out << "frame";
    for (std::size_t k = 0; k < n; ++k) out << ",d" << (k + 1);
    out << "\n";
  }
  for (const FrameRecord& r : records) {
    if (r.distances.size() != n) {
      throw LoopError(ErrorCode::kInvalidArgument,
                      "all frames must have the same number of distances");
    }
    out << r.frame_index;
    for (double d : r.distances) out << ',' << FormatValue(d);
    out << '\n';
  }
}

void WriteFramesCsvFile(const std::filesystem::path& path,
                        std::span<const FrameRecord> records) {
  std::ofstream out(path);
  if (!out) {
    throw LoopError(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  }
  WriteFramesCsv(out, records);
  if (!out) throw LoopError(ErrorCode::kIo, "write to " + path.string() + " failed");
}

std::vector<FrameRecord> ReadFramesCsv(std::istream& in) {
  std::string line;
  int line_number = 0;
  std::size_t columns = 0;
  std::vector<FrameRecord> records;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (columns == 0) {
      if (fields.empty() || fields.front() != "frame" || fields.size() < 4) {
        throw LoopError(ErrorCode::kIo,
                        IoError(line_number,
                                "expected header 'frame,' followed by at least "
                                "three distance columns"));
      }
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      throw LoopError(ErrorCode::kIo,
                      IoError(line_number, "expected " + std::to_string(columns) +
                                               " fields, got " +
                                               std::to_string(fields.size())));
    }
    FrameRecord record;
    char* end = nullptr;
    const long frame = std::strtol(fields[0].c_str(), &end, 10);
    if (fields[0].empty() || *end != '\0' || frame < 1) {
      throw LoopError(ErrorCode::kIo,
                      IoError(line_number, "frame index must be an integer >= 1"));
    }
    record.frame_index = static_cast<int>(frame);
    for (std::size_t k = 1; k < columns; ++k) {
      const double v = std::strtod(fields[k].c_str(), &end);
      if (fields[k].empty() || *end != '\0' || !std::isfinite(v) || v < 0.0) {
        throw LoopError(ErrorCode::kIo,
                        IoError(line_number, "distance '" + fields[k] +
                                                 "' is not a finite value >= 0"));
      }
      record.distances.push_back(v);
    }
    records.push_back(std::move(record));
  }
  if (columns == 0) throw LoopError(ErrorCode::kIo, "missing CSV header");
  return records;
}

std::vector<FrameRecord> ReadFramesCsvFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoopError(ErrorCode::kIo, "cannot open " + path.string());
  return ReadFramesCsv(in);
}

}  // namespace loopsfm
