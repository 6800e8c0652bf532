#include "loopsfm/fixtures.h"

namespace loopsfm::fixtures {

std::vector<FrameRecord> PublishedRecords() {
  std::vector<FrameRecord> records;
  records.reserve(kPublishedDistances.size());
  for (std::size_t i = 0; i < kPublishedDistances.size(); ++i) {
    records.push_back({static_cast<int>(i + 1),
                       {kPublishedDistances[i].begin(), kPublishedDistances[i].end()}});
  }
  return records;
}

}  // namespace loopsfm::fixtures
