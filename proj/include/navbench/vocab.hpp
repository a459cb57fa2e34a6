#pragma once

#include <string>
#include <vector>

#include "navbench/language.hpp"

namespace navbench {

struct RoomType {
    std::string name;
    std::vector<std::string> objects;
};

// Fixed vocabulary: five room types with disjoint object lists, so a category
// pins down its room.
inline const std::vector<RoomType>& room_types() {
    static const std::vector<RoomType> types = {
        {"kitchen", {"sink", "microwave", "refrigerator", "stove", "kettle"}},
        {"bathroom", {"toilet", "bathtub", "washbasin", "mirror"}},
        {"bedroom", {"bed", "wardrobe", "nightstand", "lamp"}},
        {"living_room", {"sofa", "tv_stand", "coffee_table", "bookshelf"}},
        {"office", {"desk", "office_chair", "monitor", "filing_cabinet"}},
    };
    return types;
}

inline std::vector<std::string> category_vocabulary() {
    std::vector<std::string> all;
    for (const RoomType& t : room_types())
        all.insert(all.end(), t.objects.begin(), t.objects.end());
    return all;
}

// Index into room_types(), or -1 for a category outside the vocabulary.
inline int room_of_category(const std::string& category) {
    const std::vector<RoomType>& types = room_types();
    for (std::size_t i = 0; i < types.size(); ++i) {
        for (const std::string& obj : types[i].objects) {
            if (obj == category) return static_cast<int>(i);
        }
    }
    return -1;
}

// Affinity is high for categories sharing a room type and low otherwise,
// which is all the co-occurrence stub needs to rank clusters.
inline CooccurrenceTable make_cooccurrence_table(double same_room_weight,
                                                 double cross_room_weight) {
    CooccurrenceTable table;
    const std::vector<std::string> all = category_vocabulary();
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i; j < all.size(); ++j) {
            const bool same = room_of_category(all[i]) == room_of_category(all[j]);
            table[{all[i], all[j]}] = same ? same_room_weight : cross_room_weight;
        }
    }
    return table;
}

inline CooccurrenceTable default_cooccurrence_table() {
    return make_cooccurrence_table(0.85, 0.08);
}

} // namespace navbench
