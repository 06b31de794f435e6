//! Robot actions grouped into five categories.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_CATEGORIES: usize = 5;
pub const NUM_ACTIONS: usize = 45;

/// Required action count per category, in category order.
pub const CATEGORY_SIZES: [usize; NUM_CATEGORIES] = [3, 5, 11, 10, 16];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub action_id: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub category_id: usize,
    pub label: String,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionCatalog {
    categories: Vec<Category>,
    #[serde(skip)]
    category_of: Vec<usize>,
}

/// On-disk form: ids are implied by position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogFile {
    pub categories: Vec<CategoryFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryFile {
    pub label: String,
    pub actions: Vec<String>,
}

const DEFAULT_CATALOG: [(&str, &[&str]); NUM_CATEGORIES] = [
    (
        "dancing",
        &["wave right hand", "wave left hand", "wave both hands"],
    ),
    (
        "greeting",
        &[
            "Hello!",
            "Good morning!",
            "Nice to meet you!",
            "How are you today?",
            "I'm glad you came!",
        ],
    ),
    (
        "questions",
        &[
            "What do you want to eat?",
            "What is your favorite color?",
            "Do you like animals?",
            "What did you do yesterday?",
            "Where would you like to travel?",
            "What is your hobby?",
            "Do you like music?",
            "What season do you like best?",
            "Do you play any sports?",
            "What is your favorite movie?",
            "Are you a morning person?",
        ],
    ),
    (
        "onomatopoeia",
        &[
            "Boing boing!",
            "Pitter-patter!",
            "Zoom!",
            "Ding-dong!",
            "Tick-tock!",
            "Splash!",
            "Munch munch!",
            "Whoosh!",
            "Knock knock!",
            "Yawn!",
        ],
    ),
    (
        "jokes",
        &[
            "Why did the robot go on vacation? To recharge!",
            "I told my battery a joke. It got a charge out of it.",
            "My favorite music is heavy metal. I'm made of it.",
            "I'm reading a book on anti-gravity. I can't put it down.",
            "Why was the math book sad? Too many problems.",
            "What do you call a sleeping bull? A bulldozer.",
            "I would tell you a UDP joke, but you might not get it.",
            "Why don't eggs tell jokes? They'd crack up.",
            "What do you call a fake noodle? An impasta.",
            "Why did the scarecrow win an award? He was outstanding in his field.",
            "I'm on a seafood diet. I see food and I eat it.",
            "Why can't a bicycle stand up? It's two-tired.",
            "What did the ocean say to the beach? Nothing, it just waved.",
            "Why did the cookie go to the doctor? It felt crummy.",
            "How does a robot eat guacamole? With computer chips.",
            "What kind of shoes do frogs wear? Open-toad sandals.",
        ],
    ),
];

impl Default for ActionCatalog {
    fn default() -> Self {
        let file = CatalogFile {
            categories: DEFAULT_CATALOG
                .iter()
                .map(|(label, actions)| CategoryFile {
                    label: label.to_string(),
                    actions: actions.iter().map(|a| a.to_string()).collect(),
                })
                .collect(),
        };
        ActionCatalog::from_file_form(file).expect("built-in catalog is valid")
    }
}

impl ActionCatalog {
    pub fn from_file_form(file: CatalogFile) -> Result<Self> {
        if file.categories.len() != NUM_CATEGORIES {
            return Err(Error::Catalog(format!(
                "expected {NUM_CATEGORIES} categories, found {}",
                file.categories.len()
            )));
        }
        let mut categories = Vec::with_capacity(NUM_CATEGORIES);
        let mut category_of = Vec::with_capacity(NUM_ACTIONS);
        for (category_id, (cat, &want)) in
            file.categories.into_iter().zip(&CATEGORY_SIZES).enumerate()
        {
            if cat.actions.len() != want {
                return Err(Error::Catalog(format!(
                    "category {category_id} ({}) must have {want} actions, found {}",
                    cat.label,
                    cat.actions.len()
                )));
            }
            let actions = cat
                .actions
                .into_iter()
                .map(|label| {
                    let action_id = category_of.len();
                    category_of.push(category_id);
                    Action { action_id, label }
                })
                .collect();
            categories.push(Category {
                category_id,
                label: cat.label,
                actions,
            });
        }
        Ok(ActionCatalog {
            categories,
            category_of,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_file_form(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_form(&self) -> CatalogFile {
        CatalogFile {
            categories: self
                .categories
                .iter()
                .map(|c| CategoryFile {
                    label: c.label.clone(),
                    actions: c.actions.iter().map(|a| a.label.clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category(&self, category_id: usize) -> &Category {
        &self.categories[category_id]
    }

    pub fn num_actions(&self) -> usize {
        self.category_of.len()
    }

    pub fn category_of(&self, action_id: usize) -> usize {
        self.category_of[action_id]
    }

    pub fn action(&self, action_id: usize) -> &Action {
        let cat = &self.categories[self.category_of[action_id]];
        let first = cat.actions[0].action_id;
        &cat.actions[action_id - first]
    }

    pub fn category_labels(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn action_labels(&self) -> Vec<&str> {
        self.categories
            .iter()
            .flat_map(|c| c.actions.iter().map(|a| a.label.as_str()))
            .collect()
    }
}
