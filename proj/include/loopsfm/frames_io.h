#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "loopsfm/geometry.h"

namespace loopsfm {

// One CSV row: projected (unsquared) distances for one frame.
struct FrameRecord {
  int frame_index = 1;
  std::vector<double> distances;

  FrameObservation ToObservation() const;
};

std::vector<FrameObservation> ToObservations(std::span<const FrameRecord> records);

// Header `frame,pq,qr,rs,sp` for four links (`frame,pq,qr,rp` for three),
// values with 17 significant digits so a write/read cycle is lossless.
void WriteFramesCsv(std::ostream& out, std::span<const FrameRecord> records);
void WriteFramesCsvFile(const std::filesystem::path& path,
                        std::span<const FrameRecord> records);

// Accepts any header whose first column is `frame` followed by >= 3 distance
// columns. Throws LoopError(kIo) on malformed input.
std::vector<FrameRecord> ReadFramesCsv(std::istream& in);
std::vector<FrameRecord> ReadFramesCsvFile(const std::filesystem::path& path);

}  // namespace loopsfm
