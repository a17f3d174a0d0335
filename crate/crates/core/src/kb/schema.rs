//! Event schema vocabulary and knowledge-base population.

use crate::event_extract::Event;
use crate::iri::{encode_segment, is_absolute_iri};
use crate::lexicon::{EventMatches, LexCategory, Slot, Thesaurus};

use super::{KbError, Result, Term, Triple, TripleStore};

pub const DEFAULT_NAMESPACE: &str = "http://agatha.example/onto#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASSOF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityClass {
    Event,
    Actor,
    Place,
    Time,
    Object,
    Organization,
    Currency,
}

impl EntityClass {
    pub const ALL: [EntityClass; 7] = [
        EntityClass::Event,
        EntityClass::Actor,
        EntityClass::Place,
        EntityClass::Time,
        EntityClass::Object,
        EntityClass::Organization,
        EntityClass::Currency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityClass::Event => "Event",
            EntityClass::Actor => "Actor",
            EntityClass::Place => "Place",
            EntityClass::Time => "Time",
            EntityClass::Object => "Object",
            EntityClass::Organization => "Organization",
            EntityClass::Currency => "Currency",
        }
    }
}

impl From<LexCategory> for EntityClass {
    fn from(c: LexCategory) -> Self {
        match c {
            LexCategory::Actor => EntityClass::Actor,
            LexCategory::Event => EntityClass::Event,
            LexCategory::Place => EntityClass::Place,
            LexCategory::Object => EntityClass::Object,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    HasActor,
    HasObject,
    HasPlace,
    HasTime,
    HasOrganization,
    HasCurrency,
    HasAction,
    InDocument,
    InCase,
    LinkedConcept,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::HasActor,
        Property::HasObject,
        Property::HasPlace,
        Property::HasTime,
        Property::HasOrganization,
        Property::HasCurrency,
        Property::HasAction,
        Property::InDocument,
        Property::InCase,
        Property::LinkedConcept,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::HasActor => "hasActor",
            Property::HasObject => "hasObject",
            Property::HasPlace => "hasPlace",
            Property::HasTime => "hasTime",
            Property::HasOrganization => "hasOrganization",
            Property::HasCurrency => "hasCurrency",
            Property::HasAction => "hasAction",
            Property::InDocument => "inDocument",
            Property::InCase => "inCase",
            Property::LinkedConcept => "linkedConcept",
        }
    }
}

/// IRIs of the schema under one namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    namespace: String,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            namespace: DEFAULT_NAMESPACE.to_string(),
        }
    }
}

impl Vocabulary {
    pub fn new(namespace: impl Into<String>) -> Result<Self> {
        let namespace = namespace.into();
        if !is_absolute_iri(&namespace) {
            return Err(KbError::InvalidIri(namespace));
        }
        Ok(Vocabulary { namespace })
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    fn mint(&self, local: &str) -> Term {
        Term::Iri(format!("{}{local}", self.namespace))
    }

    pub fn class(&self, c: EntityClass) -> Term {
        self.mint(c.as_str())
    }

    pub fn property(&self, p: Property) -> Term {
        self.mint(p.as_str())
    }

    pub fn rdf_type(&self) -> Term {
        Term::Iri(RDF_TYPE.to_string())
    }

    pub fn subclass_of(&self) -> Term {
        Term::Iri(RDFS_SUBCLASSOF.to_string())
    }

    pub fn label(&self) -> Term {
        Term::Iri(RDFS_LABEL.to_string())
    }

    /// One node per (class, normalized label).
    pub fn entity(&self, c: EntityClass, label: &str) -> Term {
        self.mint(&format!("{}/{}", c.as_str(), encode_segment(label)))
    }

    pub fn event(&self, event_id: &str) -> Term {
        self.mint(&format!("event/{}", encode_segment(event_id)))
    }

    pub fn document(&self, doc_id: &str) -> Term {
        self.mint(&format!("document/{}", encode_segment(doc_id)))
    }

    pub fn case(&self, case_id: &str) -> Term {
        self.mint(&format!("case/{}", encode_segment(case_id)))
    }

    /// Concept IRIs written under the default namespace follow this
    /// vocabulary's namespace; others are kept.
    pub fn concept(&self, iri: &str) -> Result<Term> {
        match iri.strip_prefix(DEFAULT_NAMESPACE) {
            Some(local) => Term::iri(format!("{}{local}", self.namespace)),
            None => Term::iri(iri),
        }
    }
}

fn slot_class(slot: Slot) -> Option<EntityClass> {
    match slot {
        Slot::Action => None,
        Slot::Actor => Some(EntityClass::Actor),
        Slot::Object => Some(EntityClass::Object),
        Slot::Place => Some(EntityClass::Place),
        Slot::Time => Some(EntityClass::Time),
    }
}

/// Triples describing `events` and their thesaurus links.
pub fn event_triples(events: &[Event], matches: &EventMatches, vocab: &Vocabulary) -> Result<Vec<Triple>> {
    let ty = vocab.rdf_type();
    let label = vocab.label();
    let mut out = Vec::new();
    for e in events {
        let ev = vocab.event(&e.event_id);
        out.push(Triple::new(ev.clone(), ty.clone(), vocab.class(EntityClass::Event))?);
        out.push(Triple::new(ev.clone(), vocab.property(Property::HasAction), Term::literal(&e.action))?);
        let slots = [
            (Property::HasActor, EntityClass::Actor, e.actors.iter().collect::<Vec<_>>()),
            (Property::HasObject, EntityClass::Object, e.objects.iter().collect()),
            (Property::HasPlace, EntityClass::Place, e.place.iter().collect()),
            (Property::HasTime, EntityClass::Time, e.time.iter().collect()),
            (Property::HasOrganization, EntityClass::Organization, e.organizations.iter().collect()),
            (Property::HasCurrency, EntityClass::Currency, e.currencies.iter().collect()),
        ];
        for (prop, class, mentions) in slots {
            for m in mentions {
                if m.normalized.is_empty() {
                    continue;
                }
                let node = vocab.entity(class, &m.normalized);
                out.push(Triple::new(ev.clone(), vocab.property(prop), node.clone())?);
                out.push(Triple::new(node.clone(), ty.clone(), vocab.class(class))?);
                out.push(Triple::new(node, label.clone(), Term::literal(&m.normalized))?);
            }
        }
        let doc = vocab.document(&e.provenance.doc_id);
        out.push(Triple::new(ev.clone(), vocab.property(Property::InDocument), doc.clone())?);
        out.push(Triple::new(doc, vocab.property(Property::InCase), vocab.case(&e.provenance.case_id))?);
        for m in matches.get(&e.event_id).into_iter().flatten() {
            let subject = match slot_class(m.slot) {
                None => ev.clone(),
                Some(class) => vocab.entity(class, &m.mention),
            };
            let concept = vocab.concept(&m.result.entry.concept_iri)?;
            out.push(Triple::new(subject, vocab.property(Property::LinkedConcept), concept)?);
        }
    }
    Ok(out)
}

/// Adds the event graph to `store` in one batch and returns the number of
/// new triples. Running it twice adds nothing.
pub fn populate(store: &mut TripleStore, events: &[Event], matches: &EventMatches, vocab: &Vocabulary) -> Result<usize> {
    let batch = event_triples(events, matches, vocab)?;
    store.insert(batch)
}

/// Adds `term subClassOf Class` for every row of a thesaurus-format file.
pub fn load_schema(store: &mut TripleStore, vocab: &Vocabulary, subclass_tsv: &str) -> Result<usize> {
    let th = Thesaurus::parse(subclass_tsv)?;
    let mut batch = Vec::with_capacity(th.len());
    for entry in th.entries() {
        batch.push(Triple::new(
            vocab.concept(&entry.concept_iri)?,
            vocab.subclass_of(),
            vocab.class(entry.category.into()),
        )?);
    }
    store.insert(batch)
}
