#include "attnswap/pairing.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "attnswap/error.hpp"

namespace attnswap {

std::vector<IndexedAttention> assign_fixation_indices(const std::vector<AttendedEvent>& events,
                                                      const std::vector<Element>& elements,
                                                      Dedup dedup) {
    std::map<std::string, Modality> modality_of;
    for (const Element& e : elements) modality_of[e.element_id] = e.modality;

    using SessionKey = std::pair<std::string, std::string>;  // (participant, page)
    std::map<SessionKey, std::int64_t> last_onset;
    std::map<std::pair<SessionKey, Modality>, int> next_rank;
    std::map<std::pair<SessionKey, Modality>, std::set<std::string>> indexed_elements;

    std::vector<IndexedAttention> out;
    out.reserve(events.size());
    for (const AttendedEvent& ev : events) {
        auto mod_it = modality_of.find(ev.element_id);
        if (mod_it == modality_of.end()) {
            fail(ErrorCode::DanglingReference,
                 "attended event references unknown element \"" + ev.element_id + "\"");
        }
        SessionKey session{ev.participant_id, ev.page_id};
        auto onset_it = last_onset.find(session);
        if (onset_it != last_onset.end() && ev.onset_ms < onset_it->second) {
            fail(ErrorCode::UnsortedInput,
                 "events for participant \"" + ev.participant_id + "\" on page \"" + ev.page_id +
                     "\" are not sorted by onset_ms");
        }
        last_onset[session] = ev.onset_ms;

        auto stream = std::make_pair(session, mod_it->second);
        if (dedup == Dedup::FirstFixation &&
            !indexed_elements[stream].insert(ev.element_id).second) {
            continue;  // refixation on an already-indexed element
        }
        int rank = ++next_rank[stream];
        out.push_back({ev.participant_id, ev.page_id, ev.element_id, mod_it->second, rank});
    }
    return out;
}

PairedDataset build_pairs(const std::vector<IndexedAttention>& indexed) {
    using SessionKey = std::pair<std::string, std::string>;
    struct SessionStreams {
        std::map<int, std::string> text;   // fixation_index -> element_id
        std::map<int, std::string> image;
    };
    std::map<SessionKey, SessionStreams> sessions;
    for (const IndexedAttention& ia : indexed) {
        auto& streams = sessions[{ia.participant_id, ia.page_id}];
        auto& stream = ia.modality == Modality::Text ? streams.text : streams.image;
        stream[ia.fixation_index] = ia.element_id;
    }

    PairedDataset pairs;
    for (const auto& [key, streams] : sessions) {
        for (const auto& [fi, text_id] : streams.text) {
            auto it = streams.image.find(fi);
            if (it == streams.image.end()) continue;
            pairs.push_back({text_id, it->second, key.first, key.second, fi});
        }
    }
    return pairs;
}

}  // namespace attnswap
