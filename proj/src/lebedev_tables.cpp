// Embedded Lebedev-Laikov quadrature tables (octahedral-orbit parameters).
// Reference: V.I. Lebedev and D.N. Laikov, Doklady Mathematics 59 (1999) 477-481.

#include "lebedev_tables.hpp"

namespace mmrb::detail {

static const LebedevOrbit kOrbits6[] = {
    {1, 1.0 / 6.0, 0.0, 0.0},
};

static const LebedevOrbit kOrbits26[] = {
    {1, 0.04761904761904762, 0.0, 0.0},
    {2, 0.03809523809523810, 0.0, 0.0},
    {3, 0.03214285714285714, 0.0, 0.0},
};

static const LebedevOrbit kOrbits50[] = {
    {1, 0.01269841269841270, 0.0, 0.0},
    {2, 0.02257495590828924, 0.0, 0.0},
    {3, 0.02109375000000000, 0.0, 0.0},
    {4, 0.02017333553791887, 0.3015113445777636, 0.0},
};

static const LebedevOrbit kOrbits110[] = {
    {1, 0.003828270494937162, 0.0, 0.0},
    {3, 0.009793737512487512, 0.0, 0.0},
    {4, 0.008211737283191111, 0.1851156353447362, 0.0},
    {4, 0.009942814891178103, 0.6904210483822922, 0.0},
    {4, 0.009595471336070963, 0.3956894730559419, 0.0},
    {5, 0.009694996361663028, 0.4783690288121502, 0.0},
};

static const LebedevOrbit kOrbits194[] = {
    {1, 0.1782340447244611e-2, 0.0, 0.0},
    {2, 0.5716905949977102e-2, 0.0, 0.0},
    {3, 0.5573383178848738e-2, 0.0, 0.0},
    {4, 0.5608704082587997e-2, 0.6712973442695226, 0.0},
    {4, 0.5158237711805383e-2, 0.2892465627575439, 0.0},
    {4, 0.5518771467273614e-2, 0.4446933178717437, 0.0},
    {4, 0.4106777028169394e-2, 0.1299335447650067, 0.0},
    {5, 0.5051846064614808e-2, 0.3457702197611283, 0.0},
    {6, 0.5530248916233094e-2, 0.1590417105383530, 0.8360360154824589},
};

static const LebedevOrbit kOrbits302[] = {
    {1, 0.8545911725128148e-3, 0.0, 0.0},
    {3, 0.3599119285025571e-2, 0.0, 0.0},
    {4, 0.3449788424305883e-2, 0.3515640345570105, 0.0},
    {4, 0.3604822601419882e-2, 0.6566329410219612, 0.0},
    {4, 0.3576729661743367e-2, 0.4729054132581005, 0.0},
    {4, 0.2352101413689164e-2, 0.0961830852261478, 0.0},
    {4, 0.3108953122413675e-2, 0.2219645236294178, 0.0},
    {4, 0.3650045807677255e-2, 0.7011766416089545, 0.0},
    {5, 0.2982344963171804e-2, 0.2644152887060663, 0.0},
    {5, 0.3600820932216460e-2, 0.5718955891878961, 0.0},
    {6, 0.3571540554273387e-2, 0.2510034751770465, 0.8000727494073951},
    {6, 0.3392312205006170e-2, 0.1233548532583327, 0.4127724083168531},
};

static const LebedevOrbit kOrbits590[] = {
    {1, 0.3095121295306187e-3, 0.0, 0.0},
    {3, 0.1852379698597489e-2, 0.0, 0.0},
    {4, 0.1871790639277744e-2, 0.7040954938227469, 0.0},
    {4, 0.1858812585438317e-2, 0.6807744066455244, 0.0},
    {4, 0.1852028828296213e-2, 0.6372546939258752, 0.0},
    {4, 0.1846715956151242e-2, 0.5044419707800358, 0.0},
    {4, 0.1818471778162769e-2, 0.4215761784010967, 0.0},
    {4, 0.1749564657281154e-2, 0.3317920736472123, 0.0},
    {4, 0.1617210647254411e-2, 0.2384736701421887, 0.0},
    {4, 0.1384737234851692e-2, 0.1459036449157763, 0.0},
    {4, 0.9764331165051050e-3, 0.0609503411550720, 0.0},
    {5, 0.1857161196774078e-2, 0.6116843442009876, 0.0},
    {5, 0.1705153996395864e-2, 0.3964755348199858, 0.0},
    {5, 0.1300321685886048e-2, 0.1724782009907724, 0.0},
    {6, 0.1842866472905286e-2, 0.5610263808622060, 0.3518280927733519},
    {6, 0.1802658934377451e-2, 0.4742392842551980, 0.2634716655937950},
    {6, 0.1849830560443660e-2, 0.5984126497885380, 0.1816640840360209},
    {6, 0.1713904507106709e-2, 0.3791035407695563, 0.1720795225656878},
    {6, 0.1555213603396808e-2, 0.2778673190586244, 0.0821302158193251},
    {6, 0.1802239128008525e-2, 0.5033564271075117, 0.0899920584207488},
};

static const LebedevOrbit kOrbits2030[] = {
    {1, 0.4656031899197431e-4, 0.0, 0.0},
    {3, 0.5421549195295507e-3, 0.0, 0.0},
    {4, 0.1778522133346553e-3, 0.0254083533681435, 0.0},
    {4, 0.2811325405682796e-3, 0.0639932280050492, 0.0},
    {4, 0.3548896312631459e-3, 0.1088269469804125, 0.0},
    {4, 0.4090310897173364e-3, 0.1570670798818287, 0.0},
    {4, 0.4493286134169965e-3, 0.2071163932282514, 0.0},
    {4, 0.4793728447962723e-3, 0.2578914044450844, 0.0},
    {4, 0.5015415319164265e-3, 0.3085687558169623, 0.0},
    {4, 0.5175127372677937e-3, 0.3584719706267024, 0.0},
    {4, 0.5285522262081019e-3, 0.4070135594428709, 0.0},
    {4, 0.5356832703713962e-3, 0.4536618626222638, 0.0},
    {4, 0.5397914736175170e-3, 0.4979195686463577, 0.0},
    {4, 0.5416899441599930e-3, 0.5393075111126999, 0.0},
    {4, 0.5419308476889938e-3, 0.6115617676843916, 0.0},
    {4, 0.5416936902030596e-3, 0.6414308435160159, 0.0},
    {4, 0.5419544338703164e-3, 0.6664099412721607, 0.0},
    {4, 0.5428983656630974e-3, 0.6859161771214913, 0.0},
    {4, 0.5442286500098193e-3, 0.6993625593503890, 0.0},
    {4, 0.5452250345057301e-3, 0.7062393387719380, 0.0},
    {5, 0.2568002497728530e-3, 0.0747902816834976, 0.0},
    {5, 0.3827211700292145e-3, 0.1848951153969366, 0.0},
    {5, 0.4579491561917824e-3, 0.3059529066581305, 0.0},
    {5, 0.5042003969083574e-3, 0.4285556101021362, 0.0},
    {5, 0.5312708889976024e-3, 0.5468758653496526, 0.0},
    {5, 0.5438401790747117e-3, 0.6565821978343439, 0.0},
    {6, 0.3316041873197344e-3, 0.1253901572367117, 0.0368191722643964},
    {6, 0.3899113567153771e-3, 0.1775721510383941, 0.0798248760721330},
    {6, 0.4343343327201309e-3, 0.2305693358216114, 0.1264640966592335},
    {6, 0.4679415262318919e-3, 0.2836502845992063, 0.1751585683418957},
    {6, 0.4930847981631031e-3, 0.3361794746232590, 0.2247995907632670},
    {6, 0.5115031867540091e-3, 0.3875979172264824, 0.2745299257422246},
    {6, 0.5245217148457367e-3, 0.4374019316999074, 0.3236373482441118},
    {6, 0.5332041499895321e-3, 0.4851275843340022, 0.3714967859436741},
    {6, 0.5384583126021542e-3, 0.5303391803806868, 0.4175353646321745},
    {6, 0.5411067210798852e-3, 0.5726197380596287, 0.4612084406355461},
    {6, 0.4259797391468714e-3, 0.2431520732564863, 0.0425804013304395},
    {6, 0.4604931368460021e-3, 0.3002096800895869, 0.0886942430672272},
    {6, 0.4871814878255202e-3, 0.3558554457457432, 0.1368811706510655},
    {6, 0.5072242910074885e-3, 0.4097782537048887, 0.1860739985015033},
    {6, 0.5217069845235350e-3, 0.4616337666067458, 0.2354235077395853},
    {6, 0.5315785966280310e-3, 0.5110707008417874, 0.2842074921347011},
    {6, 0.5376833708758905e-3, 0.5577415286163795, 0.3317784414984102},
    {6, 0.5408032092069521e-3, 0.6013060431366950, 0.3775299002040700},
    {6, 0.4842744917904866e-3, 0.3661596767261781, 0.0459936788716459},
    {6, 0.5048926076188130e-3, 0.4237633153506581, 0.0940489377365442},
    {6, 0.5202607980478373e-3, 0.4786328454658452, 0.1431377109091971},
    {6, 0.5309932388325743e-3, 0.5305702076789774, 0.1924186388843570},
    {6, 0.5377419770895208e-3, 0.5793436224231788, 0.2411590944775190},
    {6, 0.5411696331677717e-3, 0.6247069017094747, 0.2886871491583605},
    {6, 0.5197996293282420e-3, 0.4874315552535204, 0.0480497877495321},
    {6, 0.5311120836622945e-3, 0.5427337322059053, 0.0971685719936666},
    {6, 0.5384309319956951e-3, 0.5943493747246700, 0.1465205839795055},
    {6, 0.5421859504051886e-3, 0.6421314033564943, 0.1953579449803574},
    {6, 0.5390948355046314e-3, 0.6020628374713980, 0.0491637501573811},
    {6, 0.5433312705027845e-3, 0.6529222529856881, 0.0986162154012701},
};

const LebedevRule kLebedevRules[] = {
    {6, 3, kOrbits6, 1},
    {26, 7, kOrbits26, 3},
    {50, 11, kOrbits50, 4},
    {110, 17, kOrbits110, 6},
    {194, 23, kOrbits194, 9},
    {302, 29, kOrbits302, 12},
    {590, 41, kOrbits590, 20},
    {2030, 77, kOrbits2030, 56},
};

const int kLebedevRuleCount = 8;

} // namespace mmrb::detail
