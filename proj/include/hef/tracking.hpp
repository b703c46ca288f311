#pragma once

#include <vector>

#include "hef/components.hpp"

namespace hef {

enum class TrackStatus { Active, Ended, Erupted };

struct TrackFrameStat {
    int frame_index = 0;
    Timestamp timestamp = 0;
    long long area = 0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double mean_intensity = 0.0;
    double disk_mean = 0.0;
    double length_px = 0.0;
    // Photometric stats relative to the local background (0 when not taken):
    // the brightest pixel's fractional lift, and the pixel count at or above
    // half that lift.
    double peak_excess = 0.0;
    long long area_half = 0;
};

/// One grouped detection in one frame, with the per-frame statistics the
/// reports need later.
struct GroupObservation {
    Component group;
    double mean_intensity = 0.0;
    double disk_mean = 0.0;
    double length_px = 0.0;
    double peak_excess = 0.0;
    long long area_half = 0;
};

struct EventTrack {
    int id = 0;
    int class_id = 0;
    TrackStatus status = TrackStatus::Active;
    std::vector<TrackFrameStat> frames;
    Timestamp first_seen = 0;
    Timestamp last_seen = 0;
    Component last_group;
};

/// Identity assignment over time by pixel-overlap voting against the last
/// vote_window frames, plus track lifecycle bookkeeping. IDs are never
/// reused within a store's lifetime.
class TrackStore {
public:
    explicit TrackStore(int vote_window = 5) : vote_window_(vote_window) {}

    /// Fold one frame's groups of one class into the store. Every group
    /// takes the ID with the highest overlap vote total across the window;
    /// conflicting claims go to the larger total, everyone else is a fresh
    /// track. Returns the assigned IDs, parallel to `observations`.
    std::vector<int> update(int class_id, int frame_index, Timestamp timestamp,
                            const std::vector<GroupObservation>& observations);

    /// Mark active class tracks unseen for more than max_gap_frames as
    /// ended; returns the IDs that ended just now.
    std::vector<int> end_stale(int class_id, int frame_index, int max_gap_frames);

    /// Sequence finished: end all still-active tracks of the class.
    std::vector<int> end_all(int class_id);

    EventTrack* find(int id);
    std::vector<EventTrack>& tracks() { return tracks_; }
    const std::vector<EventTrack>& tracks() const { return tracks_; }

private:
    struct HistoryEntry {
        int class_id = 0;
        int frame_index = 0;
        int track_id = 0;
        Component group;
    };

    int vote_window_;
    int next_id_ = 1;
    std::vector<EventTrack> tracks_;
    std::vector<HistoryEntry> history_;
};

} // namespace hef
