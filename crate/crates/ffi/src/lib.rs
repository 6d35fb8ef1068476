//! C ABI for fockflow.
//!
//! Objects cross the boundary as opaque handles released with the matching
//! `ff_*_free`. Every fallible
//! call returns an [`FfStatus`]; on failure the message is available from
//! [`ff_last_error`] on the same thread until the next failing call.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`ff_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fockflow::circuit::{compile, AnsatzConfig, ParameterizedCircuit};
use fockflow::cli::{builtin_lexicon, prove_text, Proved, EXIT_DATA, EXIT_USAGE};
use fockflow::dataset::{self, DatasetEntry, Vocabulary};
use fockflow::diagram::{build_model_diagram, Combination, Model};
use fockflow::logic::Lexicon;
use fockflow::qsim::distribution;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Data = 4,
    NoProof = 5,
    OutOfRange = 6,
    Internal = 7,
    Panic = 8,
}

/// A lexicon with its storage bound.
pub struct FfLexicon(Lexicon);

/// A proved discourse with its diagram.
pub struct FfProof(Proved);

/// The entries of a generated or loaded dataset.
pub struct FfDataset(Vec<DatasetEntry>);

/// A compiled parameterized circuit.
pub struct FfCircuit(ParameterizedCircuit);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: FfStatus, message: impl ToString) -> FfStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
    status
}

fn guard(f: impl FnOnce() -> FfStatus) -> FfStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(FfStatus::Panic, "panic inside fockflow"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, FfStatus> {
    if p.is_null() {
        return Err(fail(FfStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(FfStatus::InvalidUtf8, e))
}

unsafe fn give<T>(out: *mut *mut T, value: T) -> FfStatus {
    *out = Box::into_raw(Box::new(value));
    FfStatus::Ok
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> FfStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FfStatus::Ok
        }
        Err(e) => fail(FfStatus::Internal, e),
    }
}

fn model_of(model: u32, combination: u32) -> Result<(Model, Combination), FfStatus> {
    let m = (model as usize)
        .checked_sub(1)
        .and_then(|i| Model::ALL.get(i))
        .ok_or_else(|| fail(FfStatus::InvalidArgument, format!("unknown model {model}")))?;
    let op = Combination::ALL
        .get(combination as usize)
        .ok_or_else(|| fail(FfStatus::InvalidArgument, format!("unknown combination {combination}")))?;
    Ok((*m, *op))
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            return fail(FfStatus::NullArgument, "null pointer argument");
        }
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ff_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ff_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ff_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The bundled lexicon with storage bound `k0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_lexicon_builtin(k0: usize, out: *mut *mut FfLexicon) -> FfStatus {
    nonnull!(out);
    guard(|| match builtin_lexicon(k0) {
        Ok(l) => give(out, FfLexicon(l)),
        Err(e) => fail(FfStatus::InvalidArgument, e.message),
    })
}

/// Parses lexicon text (`word<TAB>type[<TAB>copula]` per line).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_lexicon_parse(text: *const c_char, k0: usize, out: *mut *mut FfLexicon) -> FfStatus {
    nonnull!(out);
    guard(|| {
        let text = tri!(str_arg(text));
        match Lexicon::parse(text, k0) {
            Ok(l) => give(out, FfLexicon(l)),
            Err(e) => fail(FfStatus::Data, e),
        }
    })
}

/// # Safety
/// `lex` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_lexicon_free(lex: *mut FfLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// Proves a discourse; sentences end with '.'.
///
/// # Safety
/// `lex` must be a live handle, `text` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_prove(
    lex: *const FfLexicon,
    text: *const c_char,
    depth: usize,
    out: *mut *mut FfProof,
) -> FfStatus {
    nonnull!(lex, out);
    guard(|| {
        let text = tri!(str_arg(text));
        match prove_text(&(*lex).0, text, depth) {
            Ok(p) => give(out, FfProof(p)),
            Err(e) if e.message.starts_with("no proof") => fail(FfStatus::NoProof, e.message),
            Err(e) if e.code == EXIT_DATA => fail(FfStatus::Data, e.message),
            Err(e) if e.code == EXIT_USAGE => fail(FfStatus::InvalidArgument, e.message),
            Err(e) => fail(FfStatus::Internal, e.message),
        }
    })
}

/// Proof, sequent and diagram as one JSON document.
///
/// # Safety
/// `proof` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_proof_json(proof: *const FfProof, out: *mut *mut c_char) -> FfStatus {
    nonnull!(proof, out);
    guard(|| match serde_json::to_string(&(*proof).0) {
        Ok(s) => give_string(out, s),
        Err(e) => fail(FfStatus::Internal, e),
    })
}

/// Number of boxes in the proof's diagram, or `Data` when the proof has no
/// diagram.
///
/// # Safety
/// `proof` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_proof_box_count(proof: *const FfProof, out: *mut usize) -> FfStatus {
    nonnull!(proof, out);
    let p = &(*proof).0;
    match &p.diagram {
        Some(d) => {
            *out = d.boxes.len();
            FfStatus::Ok
        }
        None => fail(FfStatus::Data, p.diagram_error.clone().unwrap_or_default()),
    }
}

/// # Safety
/// `proof` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_proof_free(proof: *mut FfProof) {
    if !proof.is_null() {
        drop(Box::from_raw(proof));
    }
}

/// The 144-entry template dataset from the default vocabulary.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_dataset_generate(out: *mut *mut FfDataset) -> FfStatus {
    nonnull!(out);
    guard(|| match dataset::generate(&Vocabulary::default()) {
        Ok(d) => give(out, FfDataset(d)),
        Err(e) => fail(FfStatus::Internal, e),
    })
}

/// Loads a dataset CSV.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_dataset_load(path: *const c_char, out: *mut *mut FfDataset) -> FfStatus {
    nonnull!(out);
    guard(|| {
        let path = tri!(str_arg(path));
        match dataset::load(path.as_ref()) {
            Ok(d) => give(out, FfDataset(d)),
            Err(e) => fail(FfStatus::Data, e),
        }
    })
}

/// # Safety
/// `ds` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ff_dataset_len(ds: *const FfDataset) -> usize {
    if ds.is_null() {
        0
    } else {
        (*ds).0.len()
    }
}

unsafe fn entry<'a>(ds: *const FfDataset, index: usize) -> Result<&'a DatasetEntry, FfStatus> {
    let ds = &*ds;
    ds.0.get(index)
        .ok_or_else(|| fail(FfStatus::OutOfRange, format!("entry {index} out of range")))
}

/// Gold label (0 subject, 1 object) of entry `index`.
///
/// # Safety
/// `ds` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_dataset_label(ds: *const FfDataset, index: usize, out: *mut u8) -> FfStatus {
    nonnull!(ds, out);
    *out = tri!(entry(ds, index)).label;
    FfStatus::Ok
}

/// Surface text of entry `index`.
///
/// # Safety
/// `ds` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_dataset_sentence(ds: *const FfDataset, index: usize, out: *mut *mut c_char) -> FfStatus {
    nonnull!(ds, out);
    let e = tri!(entry(ds, index));
    give_string(out, e.sentence())
}

/// # Safety
/// `ds` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_dataset_free(ds: *mut FfDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Builds and compiles the circuit of entry `index` under `model` (1-4) and
/// `combination` (0 spider, 1 controlled rotation) with the default ansatz.
///
/// # Safety
/// `ds` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_compile(
    ds: *const FfDataset,
    index: usize,
    model: u32,
    combination: u32,
    k0: usize,
    out: *mut *mut FfCircuit,
) -> FfStatus {
    nonnull!(ds, out);
    guard(|| {
        let (m, op) = tri!(model_of(model, combination));
        let e = tri!(entry(ds, index));
        let d = match build_model_diagram(e, m, op, k0) {
            Ok(d) => d,
            Err(err) => return fail(FfStatus::Data, err),
        };
        match compile(&d, &AnsatzConfig::default()) {
            Ok(c) => give(out, FfCircuit(c)),
            Err(err) => fail(FfStatus::Internal, err),
        }
    })
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_qubits(c: *const FfCircuit) -> usize {
    if c.is_null() {
        0
    } else {
        (*c).0.qubit_count
    }
}

/// Number of parameter slots the circuit reads.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_slot_count(c: *const FfCircuit) -> usize {
    if c.is_null() {
        0
    } else {
        (*c).0.slots.len()
    }
}

/// Name of slot `index`.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_slot_name(c: *const FfCircuit, index: usize, out: *mut *mut c_char) -> FfStatus {
    nonnull!(c, out);
    let c = &*c;
    match c.0.slots.get(index) {
        Some(name) => give_string(out, name.clone()),
        None => fail(FfStatus::OutOfRange, format!("slot {index} out of range")),
    }
}

/// Gate list and slots as JSON.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_json(c: *const FfCircuit, out: *mut *mut c_char) -> FfStatus {
    nonnull!(c, out);
    guard(|| match serde_json::to_string(&(*c).0) {
        Ok(s) => give_string(out, s),
        Err(e) => fail(FfStatus::Internal, e),
    })
}

/// Class probabilities for angles `theta[0..len]`, one per slot in slot
/// order.
///
/// # Safety
/// `c` must be a live handle, `theta` must point to `len` doubles and both
/// outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_distribution(
    c: *const FfCircuit,
    theta: *const f64,
    len: usize,
    out_l0: *mut f64,
    out_l1: *mut f64,
) -> FfStatus {
    nonnull!(c, out_l0, out_l1);
    if len > 0 && theta.is_null() {
        return fail(FfStatus::NullArgument, "null angle array");
    }
    guard(|| {
        let circuit = &(*c).0;
        if len != circuit.slots.len() {
            return fail(
                FfStatus::InvalidArgument,
                format!("expected {} angles, got {len}", circuit.slots.len()),
            );
        }
        let values = if len == 0 { &[][..] } else { std::slice::from_raw_parts(theta, len) };
        match circuit.bind_local(values).and_then(|b| distribution(&b)) {
            Ok(d) => {
                *out_l0 = d.l0;
                *out_l1 = d.l1;
                FfStatus::Ok
            }
            Err(e) => fail(FfStatus::Internal, e),
        }
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_circuit_free(c: *mut FfCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}
