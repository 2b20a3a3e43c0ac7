#include "networth/profiles.hpp"

namespace networth {

std::vector<TrafficProfile> builtin_profiles()
{
    // Row 5 and 6 keep their published exponent denominators (0.5 and 10),
    // which differ from b_max (0.512 and 5).
    return {
        {1, UtilityFunction::hard_real_time(0.03), PriorityLevel(2),
         {mbyte_to_mbit(1), mbyte_to_mbit(6)}, "Voice service & Audio phone"},
        {2, UtilityFunction::hard_real_time(0.256), PriorityLevel(3),
         {mbyte_to_mbit(20), mbyte_to_mbit(70)}, "Video-phone & Video conf."},
        {3, UtilityFunction::real_time(1.045, 2.166, 1.0, 4.0), PriorityLevel(2),
         {mbyte_to_mbit(10), mbyte_to_mbit(100)}, "Interac. Multimedia & VoD"},
        {4, UtilityFunction::elastic(4.6, 0.02, 0.02), PriorityLevel(1),
         {kbyte_to_mbit(10), kbyte_to_mbit(500)}, "E-mail, Paging & Fax"},
        {5, UtilityFunction::elastic(4.6, 0.512, 0.5), PriorityLevel(4),
         {mbyte_to_mbit(1), mbyte_to_mbit(10)}, "Remote Login & Data on Demand"},
        {6, UtilityFunction::elastic(4.6, 5.0, 10.0), PriorityLevel(1),
         {mbyte_to_mbit(1), mbyte_to_mbit(100)}, "File Transfer & Retrieval Service"},
    };
}

}  // namespace networth
