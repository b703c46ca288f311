#include "hef/tracking.hpp"

#include <algorithm>
#include <map>

namespace hef {

EventTrack* TrackStore::find(int id) {
    for (EventTrack& t : tracks_)
        if (t.id == id)
            return &t;
    return nullptr;
}

std::vector<int> TrackStore::update(int class_id, int frame_index, Timestamp timestamp,
                                    const std::vector<GroupObservation>& observations) {
    // votes come from the t previous frames only
    std::erase_if(history_, [&](const HistoryEntry& e) {
        return e.frame_index < frame_index - vote_window_;
    });

    const int n = static_cast<int>(observations.size());
    std::vector<int> best_id(n, 0);
    std::vector<long long> best_votes(n, 0);
    for (int i = 0; i < n; ++i) {
        std::map<int, long long> votes;
        for (const HistoryEntry& e : history_) {
            if (e.class_id != class_id || e.frame_index >= frame_index)
                continue;
            const long long ov = overlap_area(observations[i].group, e.group);
            if (ov > 0)
                votes[e.track_id] += ov;
        }
        for (const auto& [id, v] : votes)
            if (v > best_votes[i]) { // ties keep the smaller id (map order)
                best_votes[i] = v;
                best_id[i] = id;
            }
    }

    // conflicting claims: the larger vote total keeps the id
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return best_votes[a] > best_votes[b]; });

    std::vector<int> assigned(n, 0);
    std::vector<int> taken;
    for (int idx : order) {
        int id = best_id[idx];
        if (id != 0 && std::find(taken.begin(), taken.end(), id) != taken.end())
            id = 0;
        if (id != 0) {
            EventTrack* t = find(id);
            if (!t || t->status != TrackStatus::Active)
                id = 0;
        }
        if (id == 0)
            id = next_id_++;
        else
            taken.push_back(id);
        assigned[idx] = id;
    }

    for (int i = 0; i < n; ++i) {
        const GroupObservation& obs = observations[i];
        EventTrack* track = find(assigned[i]);
        if (!track) {
            EventTrack fresh;
            fresh.id = assigned[i];
            fresh.class_id = class_id;
            fresh.first_seen = timestamp;
            tracks_.push_back(std::move(fresh));
            track = &tracks_.back();
        }
        TrackFrameStat stat;
        stat.frame_index = frame_index;
        stat.timestamp = timestamp;
        stat.area = obs.group.area;
        stat.centroid_x = obs.group.centroid_x;
        stat.centroid_y = obs.group.centroid_y;
        stat.mean_intensity = obs.mean_intensity;
        stat.disk_mean = obs.disk_mean;
        stat.length_px = obs.length_px;
        stat.peak_excess = obs.peak_excess;
        stat.area_half = obs.area_half;
        track->frames.push_back(stat);
        track->last_seen = timestamp;
        track->last_group = obs.group;

        HistoryEntry entry;
        entry.class_id = class_id;
        entry.frame_index = frame_index;
        entry.track_id = assigned[i];
        entry.group = obs.group;
        history_.push_back(std::move(entry));
    }
    return assigned;
}

std::vector<int> TrackStore::end_stale(int class_id, int frame_index, int max_gap_frames) {
    std::vector<int> ended;
    for (EventTrack& t : tracks_) {
        if (t.class_id != class_id || t.status != TrackStatus::Active || t.frames.empty())
            continue;
        if (t.frames.back().frame_index < frame_index - max_gap_frames) {
            t.status = TrackStatus::Ended;
            ended.push_back(t.id);
        }
    }
    return ended;
}

std::vector<int> TrackStore::end_all(int class_id) {
    std::vector<int> ended;
    for (EventTrack& t : tracks_) {
        if (t.class_id != class_id || t.status != TrackStatus::Active)
            continue;
        t.status = TrackStatus::Ended;
        ended.push_back(t.id);
    }
    return ended;
}

} // namespace hef
