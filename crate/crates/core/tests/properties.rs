use kernel_dna::algebra::{
    concat_encode, default_kernel, kernel_code, EnumerationBudget, GroupSpec, Homomorphism,
    LinearForm, Word,
};
use kernel_dna::bits::Bits;
use kernel_dna::channel::{corrupt, replay, ErrorKind, ErrorSpec};
use kernel_dna::codec::{
    self, check_block, decode_block, encode_block, recover_kernel_word, CodecParams, MiddleMode,
};
use kernel_dna::dna::{Base, DnaString};
use kernel_dna::fasta::{parse_fasta, write_records, BlockHeader, FastaRecord};
use kernel_dna::metrics::{
    complement, correlation, fold_safe, gc_weight, hamming, levenshtein, reverse,
    reverse_complement,
};
use proptest::prelude::*;

fn dna(len: impl Into<proptest::collection::SizeRange>) -> impl Strategy<Value = DnaString> {
    proptest::collection::vec(proptest::sample::select(Base::ALL.to_vec()), len)
        .prop_map(DnaString::new)
}

fn mode() -> impl Strategy<Value = MiddleMode> {
    proptest::sample::select(MiddleMode::ALL.to_vec())
}

fn block() -> impl Strategy<Value = (CodecParams, Bits)> {
    (4usize..=64, mode()).prop_flat_map(|(n, m)| {
        let params = CodecParams::new(n, m).unwrap();
        proptest::collection::vec(any::<bool>(), 0..=n - 1)
            .prop_map(move |bits| (params, Bits::new(bits)))
    })
}

fn equal_pair(max: usize) -> impl Strategy<Value = (DnaString, DnaString)> {
    (1..=max).prop_flat_map(|n| (dna(n), dna(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn first_base_is_t_or_g((params, a) in block()) {
        let y = encode_block(&a, &params).unwrap();
        prop_assert_eq!(y.len(), params.n());
        prop_assert!(matches!(y.bases()[0], Base::T | Base::G));
    }

    #[test]
    fn block_roundtrip_any_length((params, a) in block()) {
        let y = encode_block(&a, &params).unwrap();
        prop_assert_eq!(decode_block(&y, &params, a.len()).unwrap(), a);
    }

    #[test]
    fn gc_weight_within_one_of_half((params, a) in block()) {
        let y = encode_block(&a, &params).unwrap();
        let twice_dev = (2 * gc_weight(&y) as i64 - params.n() as i64).abs();
        prop_assert!(twice_dev <= 2);
    }

    #[test]
    fn single_substitution_never_yields_a_codeword(
        (params, a) in block(),
        pos in any::<prop::sample::Index>(),
        shift in 1usize..4,
    ) {
        let y = encode_block(&a, &params).unwrap();
        let i = pos.index(y.len());
        let mut bases = y.bases().to_vec();
        let old = bases[i];
        let new = Base::ALL[(Base::ALL.iter().position(|&b| b == old).unwrap() + shift) % 4];
        bases[i] = new;
        let received = DnaString::new(bases);
        prop_assert!(check_block(&received, &params).is_err());
        if old.bit_pair().0 != new.bit_pair().0 {
            let g = recover_kernel_word(&received);
            if i > 0 {
                prop_assert!(g.parity());
            } else {
                prop_assert!(g.parity() || !g[0]);
            }
        }
    }

    #[test]
    fn rc_is_an_involution(x in dna(0..40)) {
        prop_assert_eq!(reverse_complement(&reverse_complement(&x)), x.clone());
        prop_assert_eq!(reverse(&reverse(&x)), x.clone());
        prop_assert_eq!(complement(&complement(&x)), x.clone());
        prop_assert_eq!(reverse(&complement(&x)), complement(&reverse(&x)));
    }

    #[test]
    fn hamming_invariant_under_rc((x, y) in equal_pair(40)) {
        prop_assert_eq!(
            hamming(&x, &y).unwrap(),
            hamming(&reverse_complement(&x), &reverse_complement(&y)).unwrap()
        );
    }

    #[test]
    fn levenshtein_is_a_metric(x in dna(0..16), y in dna(0..16), z in dna(0..16)) {
        let dxy = levenshtein(&x, &y);
        prop_assert_eq!(dxy, levenshtein(&y, &x));
        prop_assert_eq!(dxy == 0, x == y);
        prop_assert!(levenshtein(&x, &z) <= dxy + levenshtein(&y, &z));
    }

    #[test]
    fn hamming_is_a_metric(
        (x, y, z) in (1usize..24).prop_flat_map(|n| (dna(n), dna(n), dna(n)))
    ) {
        let dxy = hamming(&x, &y).unwrap();
        prop_assert_eq!(dxy, hamming(&y, &x).unwrap());
        prop_assert_eq!(dxy == 0, x == y);
        prop_assert!(hamming(&x, &z).unwrap() <= dxy + hamming(&y, &z).unwrap());
        prop_assert!(levenshtein(&x, &y) <= dxy);
    }

    #[test]
    fn zero_shift_correlation_is_equality((x, y) in equal_pair(12)) {
        prop_assert_eq!(correlation(&x, &y).unwrap().bits()[0], x == y);
        prop_assert!(correlation(&x, &x).unwrap().bits()[0]);
    }

    #[test]
    fn fold_safety_is_monotone(
        x in dna(1..4),
        zy in dna(0..24),
        cut in any::<prop::sample::Index>(),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
    ) {
        let split = cut.index(zy.len() + 1);
        let z = DnaString::new(zy.bases()[..split].to_vec());
        let y = DnaString::new(zy.bases()[split..].to_vec());
        if fold_safe(&x, &z, &y) {
            let (mut lo, mut hi) = (a.index(zy.len() + 1), b.index(zy.len() + 1));
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            let window = DnaString::new(zy.bases()[lo..hi].to_vec());
            prop_assert!(fold_safe(&x, &window, &DnaString::default()));
        }
    }

    #[test]
    fn channel_is_deterministic_and_accounted(
        x in dna(0..60),
        seed in any::<u64>(),
        sub in 0.0f64..0.3,
        ins in 0.0f64..0.3,
        del in 0.0f64..0.3,
        tandem in 0.0f64..=1.0,
        max_unit in 1usize..6,
    ) {
        let spec = ErrorSpec {
            sub_rate: sub,
            ins_rate: ins,
            del_rate: del,
            tandem_rate: tandem,
            max_tandem_unit: max_unit,
            seed,
        };
        let (out, log) = corrupt(&x, &spec).unwrap();
        let (again, log2) = corrupt(&x, &spec).unwrap();
        prop_assert_eq!(&out, &again);
        prop_assert_eq!(&log, &log2);
        prop_assert_eq!(replay(&x, &log).unwrap(), out.clone());

        let ins_n = log.count(ErrorKind::Insertion);
        let del_n = log.count(ErrorKind::Deletion);
        let sub_n = log.count(ErrorKind::Substitution);
        prop_assert_eq!(out.len() + del_n, x.len() + ins_n + log.tandem_bases());
        prop_assert!(levenshtein(&x, &out) <= ins_n + del_n + sub_n + log.tandem_bases());
    }

    #[test]
    fn fasta_records_roundtrip(
        seqs in proptest::collection::vec(dna(1..200), 0..8),
        n in 4usize..64,
        m in mode(),
    ) {
        let records: Vec<FastaRecord> = seqs
            .into_iter()
            .enumerate()
            .map(|(index, sequence)| FastaRecord { header: BlockHeader { index, n, mode: m }, sequence })
            .collect();
        let parsed: Vec<FastaRecord> = parse_fasta(&write_records(&records))
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, e)| FastaRecord { header: e.header.parse().unwrap(), sequence: e.dna(i).unwrap() })
            .collect();
        prop_assert_eq!(parsed, records);
    }

    #[test]
    fn stream_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 0..300), n in 4usize..=64, m in mode()) {
        let params = CodecParams::new(n, m).unwrap();
        let (words, manifest) = codec::encode_stream(&bytes[..], &params).unwrap();
        prop_assert_eq!(manifest.total_bits, 8 * bytes.len() as u64);
        prop_assert_eq!(codec::decode_stream(&words, &manifest).unwrap(), bytes);
    }
}

fn subgroup_checks(k: &[Word], total: u64) {
    let set: std::collections::HashSet<&Word> = k.iter().collect();
    for a in k {
        assert!(set.contains(&a.neg()), "{a} has no inverse in K");
        for b in k {
            assert!(set.contains(&a.add(b).unwrap()), "{a} + {b} leaves K");
        }
    }
    assert_eq!(total % k.len() as u64, 0, "|K| must divide |G|^N");
}

#[test]
fn kernel_examples_are_subgroups() {
    let z2 = GroupSpec::cyclic(2).unwrap();
    let z3 = GroupSpec::cyclic(3).unwrap();
    let z4 = GroupSpec::cyclic(4).unwrap();
    let budget = EnumerationBudget::default();

    let k = kernel_code(
        &[z2.clone(), z4.clone(), z2.clone()],
        &[
            Homomorphism::identity(&z2),
            Homomorphism::reduction(4, 2).unwrap(),
            Homomorphism::identity(&z2),
        ],
        &z2,
        budget,
    )
    .unwrap();
    subgroup_checks(&k, 16);

    let k3 = kernel_code(
        &vec![z3.clone(); 3],
        &vec![Homomorphism::identity(&z3); 3],
        &z3,
        budget,
    )
    .unwrap();
    subgroup_checks(&k3, 27);

    for n in 1..=8 {
        let k = default_kernel(&z2, &z2, n, budget).unwrap();
        assert_eq!(k.len(), 1 << n);
        subgroup_checks(&k, 1 << (n + 1));
    }

    // a non-cyclic factor: Z2xZ2 -> Z2 by summing coordinates
    let v4 = GroupSpec::new(&[2, 2]).unwrap();
    let sum = Homomorphism::new(
        v4.clone(),
        z2.clone(),
        vec![z2.element(&[1]).unwrap(), z2.element(&[1]).unwrap()],
    )
    .unwrap();
    sum.validate_exhaustive().unwrap();
    let k = kernel_code(&vec![v4.clone(); 3], &vec![sum; 3], &z2, budget).unwrap();
    assert_eq!(k.len(), 32);
    subgroup_checks(&k, 64);
}

#[test]
fn concatenation_is_a_homomorphism() {
    let z3 = GroupSpec::cyclic(3).unwrap();
    let k = kernel_code(
        &vec![z3.clone(); 3],
        &vec![Homomorphism::identity(&z3); 3],
        &z3,
        EnumerationBudget::default(),
    )
    .unwrap();
    let forms = [
        LinearForm::new(vec![1, 0, 1]),
        LinearForm::new(vec![0, 1, 1]),
        LinearForm::new(vec![2, -1, 5]),
    ];
    for a in &k {
        for b in &k {
            let lhs = concat_encode(&a.add(b).unwrap(), &forms).unwrap();
            let rhs = concat_encode(a, &forms)
                .unwrap()
                .add(&concat_encode(b, &forms).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn kernel_words_live_in_the_binary_subset() {
    use kernel_dna::algebra::kernel_subset;
    let z2 = GroupSpec::cyclic(2).unwrap();
    let one = z2.element(&[1]).unwrap();
    for n in 4..=9 {
        let subset: std::collections::HashSet<String> =
            kernel_subset(&z2, &z2, n, &one, EnumerationBudget::default())
                .unwrap()
                .iter()
                .map(|w| w.to_string())
                .collect();
        assert_eq!(subset.len(), 1 << (n - 1));
        let params = CodecParams::new(n, MiddleMode::Eq3).unwrap();
        for v in 0..1u64 << (n - 1) {
            let g = codec::to_kernel_word(&Bits::from_u64(v, n - 1), &params).unwrap();
            assert!(subset.contains(&g.to_string()), "{g} not in subset");
        }
    }
}

#[test]
fn encoder_is_injective_and_roundtrips_exhaustively() {
    for n in 5..=12 {
        for mode in MiddleMode::ALL {
            let params = CodecParams::new(n, mode).unwrap();
            let mut seen = std::collections::HashSet::new();
            for v in 0..1u64 << (n - 1) {
                let a = Bits::from_u64(v, n - 1);
                let y = encode_block(&a, &params).unwrap();
                assert_eq!(decode_block(&y, &params, n - 1).unwrap(), a);
                assert!(seen.insert(y));
            }
        }
    }
}
