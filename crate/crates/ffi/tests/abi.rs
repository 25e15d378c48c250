use std::ffi::CStr;
use std::ptr;

use fasclique_ffi::*;

#[test]
fn tournament_round_trip() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(fc_tournament_random(5, 3, 11, &mut t), FcStatus::Ok);
        assert_eq!(fc_tournament_k(t), 3);
        assert_eq!(fc_tournament_num_vertices(t), 15);

        let (mut data, mut len) = (ptr::null_mut(), 0usize);
        assert_eq!(fc_tournament_to_kpt(t, &mut data, &mut len), FcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(fc_tournament_from_kpt(data, len, &mut back), FcStatus::Ok);
        for u in 0..15 {
            for v in 0..15 {
                assert_eq!(fc_tournament_has_edge(t, u, v), fc_tournament_has_edge(back, u, v));
            }
        }
        assert_eq!(fc_tournament_has_edge(t, 0, 99), -1);
        fc_bytes_free(data, len);
        fc_tournament_free(back);
        fc_tournament_free(t);
    }
}

#[test]
fn errors_set_message() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(fc_tournament_random(5, 1, 0, &mut t), FcStatus::Parameter);
        assert!(t.is_null());
        let msg = CStr::from_ptr(fc_last_error()).to_str().unwrap();
        assert!(!msg.is_empty());

        let bad = b"KPT0";
        assert_eq!(fc_tournament_from_kpt(bad.as_ptr(), bad.len(), &mut t), FcStatus::Parse);
        assert_eq!(fc_tournament_random(5, 2, 0, ptr::null_mut()), FcStatus::NullPointer);
        assert_eq!(fc_packing_is_success(ptr::null()), -1);
        fc_tournament_free(ptr::null_mut());
        fc_packing_free(ptr::null_mut());
    }
}

#[test]
fn pack_and_read_cliques() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(fc_tournament_random(60, 3, 5, &mut t), FcStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(fc_pack(t, ptr::null(), 0, true, 9, 3, &mut r), FcStatus::Ok);
        assert_eq!(fc_packing_is_success(r), 1);
        let count = fc_packing_num_cliques(r);
        assert_eq!(count, 58);
        let mut seen = std::collections::HashSet::new();
        let mut buf = [0usize; 3];
        for i in 0..count {
            assert_eq!(fc_packing_clique(r, i, buf.as_mut_ptr()), FcStatus::Ok);
            for (p, &v) in buf.iter().enumerate() {
                assert!(seen.insert(v));
                assert_eq!(v / 60, p);
            }
        }
        assert_eq!(fc_packing_clique(r, count, buf.as_mut_ptr()), FcStatus::Parameter);
        let json = fc_packing_to_json(r);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"success\""));
        fc_string_free(json);
        fc_packing_free(r);

        // an explicit order with the wrong length is a parameter error
        let order = [0usize, 1, 2];
        assert_eq!(
            fc_pack(t, order.as_ptr(), order.len(), true, 0, 0, &mut r),
            FcStatus::Parameter
        );
        fc_tournament_free(t);
    }
}

#[test]
fn oracles() {
    unsafe {
        let mut d = 0u64;
        assert_eq!(fc_smallest_d(2, &mut d), FcStatus::Ok);
        assert_eq!(d, 24);
        let mut t = ptr::null_mut();
        assert_eq!(fc_tournament_random(2, 2, 3, &mut t), FcStatus::Ok);
        let mut fk = 99usize;
        assert_eq!(fc_brute_force_fk(t, &mut fk), FcStatus::Ok);
        assert!(fk <= 1);
        fc_tournament_free(t);
        assert_eq!(fc_tournament_random(3, 3, 3, &mut t), FcStatus::Ok);
        assert_eq!(fc_brute_force_fk(t, &mut fk), FcStatus::Resource);
        fc_tournament_free(t);
    }
}
