//! Deterministic synthetic directory generator.
//!
//! Uses ChaCha8 seeded from the caller's seed and samples only `u32` ranges,
//! so a given `(seed, n)` produces the same records on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Business, Directory, DirectoryError, Sector};

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    /// District names with the number of villages in each.
    pub districts: Vec<(String, u32)>,
    pub subvillages_per_village: u32,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        let districts = [
            ("Bukoba", 17),
            ("Karagwe", 17),
            ("Kyerwa", 17),
            ("Missenyi", 17),
            ("Muleba", 16),
            ("Ngara", 16),
        ];
        Self {
            districts: districts.iter().map(|(n, c)| (n.to_string(), *c)).collect(),
            subvillages_per_village: 3,
        }
    }
}

struct Subsector {
    label: &'static str,
    stems: &'static [&'static str],
    products: &'static [&'static str],
}

const fn sub(
    label: &'static str,
    stems: &'static [&'static str],
    products: &'static [&'static str],
) -> Subsector {
    Subsector { label, stems, products }
}

// (sector, relative weight, subsectors)
const TAXONOMY: [(Sector, u32, &[Subsector]); 6] = [
    (
        Sector::WholesaleTraders,
        12,
        &[
            sub("crop buyers", &["Mazao", "Kahawa", "Ndizi"], &["coffee", "bananas", "beans", "maize"]),
            sub("livestock traders", &["Mifugo", "Ng'ombe"], &["cattle", "goats", "chickens"]),
            sub("fish traders", &["Samaki", "Dagaa"], &["fish", "dagaa"]),
            sub("produce wholesalers", &["Jumla", "Bidhaa"], &["rice", "sugar", "flour", "cooking oil"]),
        ],
    ),
    (
        Sector::Retailers,
        30,
        &[
            sub("general shops", &["Duka", "Genge", "Kibanda"], &["soap", "sugar", "salt", "airtime"]),
            sub("agro-input shops", &["Mbegu", "Pembejeo", "Kilimo"], &["seeds", "fertilizer", "pesticide", "hoes"]),
            sub("hardware stores", &["Vifaa", "Hardware"], &["cement", "nails", "iron sheets", "paint"]),
            sub("pharmacies", &["Dawa", "Famasi"], &["medicine", "vet drugs"]),
            sub("market stalls", &["Soko", "Meza"], &["vegetables", "fruit", "tomatoes", "onions"]),
        ],
    ),
    (
        Sector::Transporters,
        15,
        &[
            sub("boda boda", &["Boda", "Piki"], &["passengers", "parcels"]),
            sub("lorries", &["Lori", "Fuso"], &["cargo", "crops", "timber"]),
            sub("pickups", &["Pickup", "Canter"], &["crops", "furniture"]),
            sub("bicycles", &["Baiskeli"], &["parcels", "bananas"]),
        ],
    ),
    (
        Sector::AgriculturalProcessors,
        10,
        &[
            sub("milling machines", &["Mashine", "Kinu"], &["maize flour", "cassava flour", "rice milling"]),
            sub("coffee processors", &["Kahawa", "Pulper"], &["coffee hulling", "coffee drying"]),
            sub("oil pressers", &["Mafuta", "Alizeti"], &["sunflower oil", "seed cake"]),
            sub("banana brewers", &["Pombe", "Rubisi"], &["banana beer", "banana wine"]),
        ],
    ),
    (
        Sector::SkilledTradespeople,
        15,
        &[
            sub("tailors", &["Fundi Cherehani", "Mshonaji"], &["clothes", "uniforms", "repairs"]),
            sub("carpenters", &["Fundi Seremala", "Mbao"], &["furniture", "doors", "beds"]),
            sub("mechanics", &["Gereji", "Fundi Pikipiki"], &["motorcycle repair", "spare parts"]),
            sub("masons", &["Fundi Mjenzi", "Ujenzi"], &["bricks", "building"]),
            sub("welders", &["Welding", "Chuma"], &["gates", "windows"]),
        ],
    ),
    (
        Sector::Services,
        18,
        &[
            sub("restaurants", &["Mgahawa", "Hoteli"], &["food", "tea", "chips"]),
            sub("salons", &["Saluni", "Kinyozi"], &["haircut", "braiding"]),
            sub("mobile money agents", &["Wakala", "M-Pesa"], &["cash", "transfers"]),
            sub("financial institutions", &["Benki", "SACCOS", "VICOBA"], &["loans", "savings"]),
            sub("veterinary", &["Mifugo Afya", "Vet"], &["vaccination", "vet drugs"]),
        ],
    ),
];

const FIRST_NAMES: &[&str] = &[
    "Asha", "Juma", "Neema", "Baraka", "Rehema", "Hamisi", "Zawadi", "Emmanuel", "Upendo", "Godfrey",
    "Mwajuma", "Amani", "Faraja", "Joseph", "Halima", "Salum", "Grace", "Daudi", "Esther", "Yusuf",
    "Happiness", "Petro", "Agnes", "Athumani", "Devota", "Elias", "Pendo", "Rashidi", "Jesca", "Richard",
    "Mariam", "Anord", "Scholastica", "Innocent", "Winfrida", "Bosco", "Leticia", "Deogratias", "Sabina", "Gaudence",
];

const LAST_NAMES: &[&str] = &[
    "Mushi", "Kato", "Rwegasira", "Byabato", "Kagaruki", "Mutalemwa", "Tibaijuka", "Kamugisha", "Rugemalira",
    "Bagenda", "Kaijage", "Mugisha", "Lwakatare", "Kahwa", "Bashasha", "Ishengoma", "Mujuni", "Katunzi",
    "Nshange", "Rutta", "Kokwenda", "Bulegeya", "Mbaga", "Ndyamukama", "Rweyemamu", "Kyaruzi", "Tungaraza",
    "Kabyemera", "Mulokozi", "Banyikwa",
];

const NAME_SUFFIXES: &[&str] = &["Bora", "Mpya", "Store", "Enterprises", "Center", "Traders", "Group", "na Wana"];

const VILLAGE_HEADS: &[&str] = &["Ka", "Ki", "Ny", "Bu", "Ru", "Mu", "Ma", "Ke", "Ib", "Nk", "Rw", "Is"];
const VILLAGE_TAILS: &[&str] = &[
    "nazi", "toro", "gara", "shanje", "bale", "kato", "mondo", "ruku", "birizi", "chumu", "zigo", "sasa",
    "hanga", "tuntu", "shozi", "rongo", "bira", "kwenda", "muli", "yaka",
];
const SUBVILLAGE_NAMES: &[&str] = &[
    "Sokoni", "Mtoni", "Kilimani", "Bondeni", "Shuleni", "Kanisani", "Stendi", "Msikitini", "Mlimani",
    "Kati", "Zahanati", "Mnadani", "Barabarani",
];
const PHONE_PREFIXES: &[&str] = &["71", "74", "75", "76", "78", "65", "68", "69", "62"];

struct GeoSlot {
    district: String,
    village: String,
    subvillage: String,
}

fn geo_slots(config: &SyntheticConfig) -> Vec<GeoSlot> {
    let combos = VILLAGE_HEADS.len() * VILLAGE_TAILS.len();
    let mut slots = Vec::new();
    let mut village_no = 0usize;
    for (district, villages) in &config.districts {
        for _ in 0..*villages {
            // stride 7 is coprime with the 240 combinations, so names never repeat
            let combo = (village_no * 7) % combos;
            let village = format!(
                "{}{}",
                VILLAGE_HEADS[combo % VILLAGE_HEADS.len()],
                VILLAGE_TAILS[combo / VILLAGE_HEADS.len()]
            );
            for k in 0..config.subvillages_per_village as usize {
                let name = SUBVILLAGE_NAMES[(village_no * 5 + k) % SUBVILLAGE_NAMES.len()];
                slots.push(GeoSlot {
                    district: district.clone(),
                    village: village.clone(),
                    subvillage: name.to_string(),
                });
            }
            village_no += 1;
        }
    }
    slots
}

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len() as u32) as usize]
}

pub fn generate_synthetic(seed: u64, n: usize) -> Result<Directory, DirectoryError> {
    generate_with(seed, n, &SyntheticConfig::default())
}

pub fn generate_with(seed: u64, n: usize, config: &SyntheticConfig) -> Result<Directory, DirectoryError> {
    if n == 0 {
        return Err(DirectoryError::EmptyRequest);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = geo_slots(config);
    let mut slot_order: Vec<u32> = (0..slots.len() as u32).collect();
    slot_order.shuffle(&mut rng);
    let total_weight: u32 = TAXONOMY.iter().map(|(_, w, _)| w).sum();

    let mut businesses = Vec::with_capacity(n);
    for i in 0..n {
        let (sector, _, subsectors) = if i < TAXONOMY.len() {
            &TAXONOMY[i]
        } else {
            let mut roll = rng.gen_range(0..total_weight);
            TAXONOMY
                .iter()
                .find(|(_, w, _)| {
                    let hit = roll < *w;
                    roll = roll.saturating_sub(*w);
                    hit
                })
                .expect("roll below total weight")
        };
        let subsector = &subsectors[rng.gen_range(0..subsectors.len() as u32) as usize];

        let first = pick(&mut rng, FIRST_NAMES);
        let last = pick(&mut rng, LAST_NAMES);
        let stem = pick(&mut rng, subsector.stems);
        let name = match rng.gen_range(0..4u32) {
            0 => format!("{stem} la {first}"),
            1 => format!("{stem} {}", pick(&mut rng, NAME_SUFFIXES)),
            2 => format!("{last} {stem}"),
            _ => format!("{stem} {first}"),
        };

        let product_count = rng.gen_range(0..=subsector.products.len().min(4) as u32) as usize;
        let mut products: Vec<String> =
            subsector.products.iter().map(|p| p.to_string()).collect();
        products.shuffle(&mut rng);
        products.truncate(product_count);

        let phone = format!(
            "255{}{:07}",
            pick(&mut rng, PHONE_PREFIXES),
            rng.gen_range(0..10_000_000u32)
        );

        let slot = if i < slots.len() {
            &slots[slot_order[i] as usize]
        } else {
            &slots[rng.gen_range(0..slots.len() as u32) as usize]
        };

        businesses.push(Business {
            id: i as u32 + 1,
            name,
            owner_name: format!("{first} {last}"),
            phone,
            sector: *sector,
            subsector: subsector.label.to_string(),
            products,
            district: slot.district.clone(),
            village: slot.village.clone(),
            subvillage: slot.subvillage.clone(),
        });
    }
    Directory::new(businesses)
}
